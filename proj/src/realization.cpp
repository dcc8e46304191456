#include "ncstable/realization.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ncstable {

LinearPencil DescriptorRealization::system_pencil() const {
  const Eigen::Index n = size();
  std::vector<ComplexMatrix> coeffs;
  coeffs.push_back(ComplexMatrix::Identity(n, n));
  for (const auto& a : A) coeffs.push_back(-a);
  return LinearPencil::from_coeffs(std::move(coeffs));
}

DescriptorRealization realize_poly(const NcPolynomial& f) {
  // States are the suffixes of the support; A_j prepends the letter j, so the
  // chain A_{j1}...A_{jk} e_empty lands on the state j1...jk and the series
  // coefficients come out in the evaluation order of eval_poly.
  std::set<Word, WordOrder> states;
  states.insert(Word{});
  for (const auto& [w, c] : f.terms())
    for (size_t k = 0; k <= w.size(); ++k)
      states.insert(Word(w.begin() + static_cast<long>(k), w.end()));

  std::map<Word, Eigen::Index, WordOrder> index;
  Eigen::Index next = 0;
  for (const auto& s : states) index[s] = next++;
  const Eigen::Index n = next;

  DescriptorRealization R;
  R.b = Eigen::VectorXcd::Zero(n);
  R.b(index.at(Word{})) = 1.0;
  R.c = Eigen::VectorXcd::Zero(n);
  for (const auto& [w, coeff] : f.terms()) R.c(index.at(w)) = std::conj(coeff);
  R.A.assign(static_cast<size_t>(f.vars()), ComplexMatrix::Zero(n, n));
  for (const auto& s : states) {
    for (int j = 1; j <= f.vars(); ++j) {
      Word q;
      q.reserve(s.size() + 1);
      q.push_back(j);
      q.insert(q.end(), s.begin(), s.end());
      auto it = index.find(q);
      if (it != index.end()) R.A[static_cast<size_t>(j - 1)](it->second, index.at(s)) = 1.0;
    }
  }
  return R;
}

ComplexMatrix eval_realization(const DescriptorRealization& R, const MatrixTuple& X) {
  if (R.vars() != X.vars()) throw InputError("eval_realization: variable count mismatch");
  const Eigen::Index n = X.vars() == 0 ? 1 : X.size();
  const Eigen::Index dn = R.size() * n;
  if (R.size() == 0) return ComplexMatrix::Zero(n, n);
  ComplexMatrix M = ComplexMatrix::Identity(dn, dn);
  for (int j = 1; j <= R.vars(); ++j) M -= kron(R.A[static_cast<size_t>(j - 1)], X.X[static_cast<size_t>(j - 1)]);
  ComplexMatrix rhs = kron(R.b, ComplexMatrix::Identity(n, n));
  Eigen::PartialPivLU<ComplexMatrix> lu(M);
  ComplexMatrix sol = lu.solve(rhs);
  if (!sol.allFinite() || (M * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm()) * (1.0 + M.norm()))
    throw EvalError("eval_realization: system pencil singular at this tuple");
  return kron(R.c.adjoint(), ComplexMatrix::Identity(n, n)) * sol;
}

DescriptorRealization invert_realization(const DescriptorRealization& R) {
  const Complex s = R.c.dot(R.b);  // c^* b
  if (std::abs(s) <= 1e-12 * (1.0 + R.c.norm() * R.b.norm()))
    throw InputError("invert_realization: value at the origin vanishes");
  const Eigen::Index n = R.size();
  Eigen::VectorXcd c_unit = R.c / std::conj(s);  // c_unit^* b = 1

  DescriptorRealization out;
  out.c = Eigen::VectorXcd::Zero(n + 1);
  out.c.head(n) = -c_unit;
  out.c(n) = 1.0;
  out.b = Eigen::VectorXcd::Zero(n + 1);
  out.b(n) = 1.0;
  out.A.reserve(R.A.size());
  const ComplexMatrix deflate =
      ComplexMatrix::Identity(n, n) - R.b * c_unit.adjoint();
  for (const auto& a : R.A) {
    ComplexMatrix big = ComplexMatrix::Zero(n + 1, n + 1);
    big.topLeftCorner(n, n) = a * deflate;
    big.topRightCorner(n, 1) = a * R.b;
    out.A.push_back(std::move(big));
  }
  // The construction inverts the normalized series r/s; rescale to get r^{-1}.
  out.c /= std::conj(s);
  return out;
}

namespace {

// Smallest subspace containing the seed columns and invariant under the maps;
// returns an orthonormal basis.
ComplexMatrix invariant_span(const std::vector<ComplexMatrix>& maps,
                             const Eigen::VectorXcd& seed, const ToleranceConfig& cfg) {
  const Eigen::Index n = seed.size();
  std::vector<Eigen::VectorXcd> basis;
  double map_scale = 1.0;
  for (const auto& m : maps) map_scale = std::max(map_scale, m.norm());
  auto add = [&](Eigen::VectorXcd v) -> bool {
    const double floor = cfg.rank_tol * (1.0 + map_scale);
    if (v.norm() <= floor) return false;
    for (const auto& u : basis) v -= u.dot(v) * u;
    for (const auto& u : basis) v -= u.dot(v) * u;
    if (v.norm() <= floor) return false;
    basis.push_back(v.normalized());
    return true;
  };
  std::vector<Eigen::VectorXcd> frontier;
  if (add(seed)) frontier.push_back(basis.back());
  while (!frontier.empty() && static_cast<Eigen::Index>(basis.size()) < n) {
    std::vector<Eigen::VectorXcd> next;
    for (const auto& m : maps)
      for (const auto& v : frontier) {
        if (add(m * v)) next.push_back(basis.back());
      }
    frontier = std::move(next);
  }
  ComplexMatrix U(n, static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index i = 0; i < U.cols(); ++i) U.col(i) = basis[static_cast<size_t>(i)];
  return U;
}

DescriptorRealization compress(const DescriptorRealization& R, const ComplexMatrix& U) {
  DescriptorRealization out;
  out.c = U.adjoint() * R.c;
  out.b = U.adjoint() * R.b;
  out.A.reserve(R.A.size());
  for (const auto& a : R.A) out.A.push_back(U.adjoint() * a * U);
  return out;
}

}  // namespace

DescriptorRealization minimize_realization(const DescriptorRealization& R,
                                           const ToleranceConfig& cfg) {
  // Controllable part: smallest A-invariant subspace containing b.
  DescriptorRealization cur = compress(R, invariant_span(R.A, R.b, cfg));
  // Observable part: the dual reduction on the adjoints through c.
  std::vector<ComplexMatrix> adj;
  adj.reserve(cur.A.size());
  for (const auto& a : cur.A) adj.push_back(a.adjoint());
  return compress(cur, invariant_span(adj, cur.c, cfg));
}

namespace {

struct PipelineData {
  Eigen::VectorXd alpha;
  Complex f_alpha = 0.0;
  DescriptorRealization minimal;  // minimal realization of g^{-1}, g = f(x+alpha)/f(alpha)
  LinearPencil shifted;           // monic system pencil shifted back by -alpha
  bool collapse_zero = false;     // the commutative collapse vanishes identically
};

PipelineData run_pipeline(const NcPolynomial& f, const ToleranceConfig& cfg,
                          std::uint64_t seed) {
  if (f.is_zero()) throw InputError("check_stable_poly: zero polynomial");
  PipelineData data;
  data.alpha = Eigen::VectorXd::Zero(f.vars());

  const auto collapse = f.commutative_collapse();
  if (collapse.empty()) {
    data.collapse_zero = true;
    return data;
  }
  double coeff_scale = 0.0;
  for (const auto& [deg, c] : collapse) coeff_scale = std::max(coeff_scale, std::abs(c));
  const double thresh = 1e-6 * (1.0 + coeff_scale);

  bool found = false;
  const int d = f.vars();
  for (int m = 0; m <= 3 && !found; ++m) {
    const long long count = static_cast<long long>(std::pow(2.0 * m + 1.0, std::max(d, 1)));
    for (long long idx = 0; idx < count && !found; ++idx) {
      long long rest = idx;
      Eigen::VectorXd alpha(d);
      bool on_shell = (m == 0);
      for (int j = 0; j < d; ++j) {
        const int v = static_cast<int>(rest % (2 * m + 1)) - m;
        rest /= (2 * m + 1);
        alpha(j) = v;
        if (std::abs(v) == m) on_shell = true;
      }
      if (!on_shell) continue;  // inner points were visited at smaller m
      const Complex value = f.scalar_eval(alpha);
      if (std::abs(value) > thresh) {
        data.alpha = alpha;
        data.f_alpha = value;
        found = true;
      }
    }
  }
  if (!found) {
    Rng rng(mix_seed(seed, 0xa1fa));
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 400 && !found; ++trial) {
      Eigen::VectorXd alpha(d);
      for (int j = 0; j < d; ++j) alpha(j) = unif(rng);
      const Complex value = f.scalar_eval(alpha);
      const double relax = thresh * std::pow(0.1, trial / 100);
      if (std::abs(value) > relax) {
        data.alpha = alpha;
        data.f_alpha = value;
        found = true;
      }
    }
  }
  if (!found)
    throw InputError("check_stable_poly: could not locate a regular real shift");

  const NcPolynomial g = f.shift(data.alpha) * (1.0 / data.f_alpha);
  data.minimal = minimize_realization(invert_realization(realize_poly(g)), cfg);
  data.shifted = shift_pencil(data.minimal.system_pencil(), -data.alpha);
  return data;
}

}  // namespace

StabilityCertificate check_stable_poly(const NcPolynomial& f, const ToleranceConfig& cfg,
                                       std::uint64_t seed) {
  PipelineData data = run_pipeline(f, cfg, seed);
  if (data.collapse_zero) {
    StabilityCertificate cert;
    cert.verdict = Verdict::Unstable;
    cert.detail = "commutative collapse vanishes identically";
    cert.seed = seed;
    std::vector<Complex> point(static_cast<size_t>(f.vars()), Complex(0, 1));
    cert.witness = MatrixTuple::scalars(point);
    return cert;
  }
  StabilityCertificate cert = check_stable(data.shifted, cfg);
  cert.seed = seed;
  cert.shift_alpha = data.alpha;
  cert.shift_value = data.f_alpha;
  if (cert.verdict == Verdict::Unstable && !cert.witness) {
    WitnessOptions opts;
    opts.seed = seed;
    // det f and det of the shifted pencil vanish together, so an upper-orthant
    // witness for the pencil refutes the polynomial as well.
    if (auto w = find_witness(data.shifted, opts, cfg)) cert.witness = std::move(w);
  }
  return cert;
}

PolyStabilityResult detrep(const NcPolynomial& f, const ToleranceConfig& cfg,
                           std::uint64_t seed) {
  PolyStabilityResult result;
  PipelineData data = run_pipeline(f, cfg, seed);
  if (data.collapse_zero) {
    result.cert.verdict = Verdict::Unstable;
    result.cert.detail = "commutative collapse vanishes identically";
    result.cert.seed = seed;
    std::vector<Complex> point(static_cast<size_t>(f.vars()), Complex(0, 1));
    result.cert.witness = MatrixTuple::scalars(point);
    return result;
  }
  result.cert = check_stable(data.shifted, cfg);
  result.cert.seed = seed;
  result.cert.shift_alpha = data.alpha;
  result.cert.shift_value = data.f_alpha;
  if (result.cert.verdict != Verdict::Stable) return result;

  if (result.cert.stages.size() != 1 || result.cert.stages.front().V.cols() != 0) {
    result.cert.detail = "multi-stage certificate: no determinantal representation assembled";
    return result;
  }

  const ComplexMatrix& D = result.cert.stages.front().D;
  const Eigen::Index n = data.shifted.rows();
  if (min_singular_value(D) <= cfg.rank_tol * spectral_norm(D)) {
    result.cert.detail = "stage solution numerically singular: no representation assembled";
    return result;
  }
  const Complex detD = D.determinant();
  const double c = std::pow(std::abs(data.f_alpha) / std::abs(detD), 1.0 / static_cast<double>(n));
  const Complex t = data.f_alpha / (std::pow(c, static_cast<double>(n)) * detD);

  LinearPencil rep = mul_left(ComplexMatrix(c * D), data.shifted);
  DetRep out;
  out.alpha = data.alpha;
  out.scaling = c;
  if (std::abs(t - Complex(1.0)) > 1e-9) {
    const double arg = std::arg(t);
    const double phi1 = arg >= 0.0 ? arg : M_PI;
    const double phi2 = arg >= 0.0 ? 0.0 : arg + M_PI;
    LinearPencil pad(f.vars(), 2, 2);
    pad.coeff(0)(0, 0) = std::polar(1.0, phi1);
    pad.coeff(0)(1, 1) = std::polar(1.0, phi2);
    rep = direct_sum(pad, rep);
    out.padded = true;
    out.pad_phases[0] = phi1;
    out.pad_phases[1] = phi2;
  }
  auto psd = is_purely_stable(rep, cfg);
  if (!psd) {
    result.cert.detail = "assembled representation failed the purely-stable check";
    return result;
  }
  out.L = std::move(rep);
  out.purely_stable = std::move(*psd);
  result.rep = std::move(out);
  return result;
}

bool verify_detrep(const NcPolynomial& f, const LinearPencil& L,
                   const std::vector<int>& sizes, int samples, std::uint64_t seed,
                   const ToleranceConfig& cfg, double* max_residual, bool parallel) {
  if (f.vars() != L.vars()) throw InputError("verify_detrep: variable count mismatch");
  bool ok = is_purely_stable(L, cfg).has_value();
  double worst = 0.0;

  for (int n : sizes) {
    if (n < 1) throw InputError("verify_detrep: sizes must be positive");
    bool size_ok = true;
    double size_worst = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) reduction(&& : size_ok) \
    reduction(max : size_worst) if (parallel)
#endif
    for (int s = 0; s < 2 * samples; ++s) {
      MatrixTuple X;
      const std::uint64_t sub =
          mix_seed(seed, 0xde7, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s));
      if (s % 2 == 0) {
        Rng rng(sub);
        X.X.reserve(static_cast<size_t>(f.vars()));
        for (int j = 0; j < f.vars(); ++j)
          X.X.push_back(random_gaussian(n, n, rng) / std::sqrt(static_cast<double>(n)));
      } else {
        X = sample_upper_point(f.vars(), n, sub);
      }
      const Complex det_f = eval_poly(f, X).determinant();
      const Complex det_L = eval_pencil(L, X).determinant();
      const double residual = std::abs(det_f - det_L) / (1.0 + std::abs(det_f));
      size_worst = std::max(size_worst, residual);
      if (residual > cfg.residual_tol) size_ok = false;
    }
    ok = ok && size_ok;
    worst = std::max(worst, size_worst);
  }
  if (max_residual) *max_residual = worst;
  return ok;
}

NcPolynomial gen_stable_poly(const std::vector<double>& alphas,
                             const std::vector<double>& betas) {
  if (alphas.empty() || alphas.size() != betas.size())
    throw InputError("gen_stable_poly: alphas and betas must be nonempty and match");
  for (double a : alphas)
    if (!(a < 0.0)) throw InputError("gen_stable_poly: alphas must be negative");
  for (size_t i = 0; i < betas.size(); ++i)
    for (size_t j = i + 1; j < betas.size(); ++j)
      if (betas[i] == betas[j]) throw InputError("gen_stable_poly: betas must be distinct");

  const size_t ell = alphas.size();
  auto poly_mul = [](const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out(p.size() + q.size() - 1, 0.0);
    for (size_t i = 0; i < p.size(); ++i)
      for (size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
  };

  std::vector<double> q{1.0};
  for (double b : betas) q = poly_mul(q, {-b, 1.0});
  std::vector<double> p(ell, 0.0);
  for (size_t k = 0; k < ell; ++k) {
    std::vector<double> partial{alphas[k]};
    for (size_t l = 0; l < ell; ++l)
      if (l != k) partial = poly_mul(partial, {-betas[l], 1.0});
    for (size_t i = 0; i < partial.size(); ++i) p[i] += partial[i];
  }

  NcPolynomial f(2);
  for (size_t m = 0; m < p.size(); ++m)
    if (p[m] != 0.0) f.add_term(Word(m, 1), p[m]);
  for (size_t m = 0; m < q.size(); ++m)
    if (q[m] != 0.0) {
      Word w(m, 1);
      w.push_back(2);
      f.add_term(w, q[m]);
    }
  return f;
}

std::optional<Verdict> affine_hermitian_check(const NcPolynomial& f,
                                              const ToleranceConfig& cfg) {
  if (!is_hermitian_poly(f)) throw InputError("affine_hermitian_check: f is not hermitian");
  if (std::abs(f.coeff(Word{}) - Complex(1.0)) > 1e-12)
    throw InputError("affine_hermitian_check: requires f(0) = 1");

  if (f.degree() <= 1) {
    bool has_pos = false, has_neg = false;
    for (const auto& [w, c] : f.terms()) {
      if (w.empty()) continue;
      if (c.real() > 0) has_pos = true;
      if (c.real() < 0) has_neg = true;
    }
    if (!(has_pos && has_neg)) return Verdict::Stable;
    return std::nullopt;  // mixed signs: defer to the full pipeline
  }

  const DescriptorRealization minimal =
      minimize_realization(invert_realization(realize_poly(f)), cfg);
  if (is_irreducible(minimal.system_pencil(), cfg)) return Verdict::Unstable;
  return std::nullopt;
}

}  // namespace ncstable
