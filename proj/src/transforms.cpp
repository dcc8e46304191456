#include "ncstable/transforms.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

namespace ncstable {

LinearPencil hurwitz_to_stable(const LinearPencil& L) {
  LinearPencil out = L;
  for (int j = 1; j <= L.vars(); ++j) out.coeff(j) = Complex(0, -1) * L.coeff(j);
  return out;
}

StabilityCertificate check_hurwitz(const LinearPencil& L, const ToleranceConfig& cfg,
                                   std::uint64_t seed) {
  const LinearPencil reduced = hurwitz_to_stable(L);
  StabilityCertificate cert = check_stable(reduced, cfg);
  cert.kind = "hurwitz";
  cert.seed = seed;
  if (cert.verdict == Verdict::Unstable) {
    WitnessOptions opts;
    opts.mode = WitnessMode::Upper;
    opts.seed = seed;
    if (auto upper = find_witness(reduced, opts, cfg)) {
      // L(-iU) = reduced(U), so -iU lies in the right-half-plane region.
      MatrixTuple w = *upper;
      for (auto& x : w.X) x = Complex(0, -1) * x;
      cert.witness = std::move(w);
    }
  }
  return cert;
}

std::optional<LinearPencil> schur_to_stable(const LinearPencil& input) {
  LinearPencil L = input.rows() >= input.cols() ? input : transpose_pencil(input);
  const Eigen::Index delta = L.rows();
  const Eigen::Index eps = L.cols();
  const int d = L.vars();

  Eigen::JacobiSVD<ComplexMatrix> svd(L.coeff(0), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() < eps || s(0) == 0.0 || s(eps - 1) <= 1e-12 * s(0)) return std::nullopt;

  // Basis change to A_0 = [0; I]: S = P U^*, T = V Sigma^{-1}, with P moving
  // the leading eps rows to the bottom.
  ComplexMatrix T = svd.matrixV();
  for (Eigen::Index i = 0; i < eps; ++i) T.col(i) /= s(i);
  std::vector<ComplexMatrix> primed;
  primed.reserve(static_cast<size_t>(d) + 1);
  for (int j = 0; j <= d; ++j) {
    ComplexMatrix M = svd.matrixU().adjoint() * L.coeff(j) * T;
    ComplexMatrix P(delta, eps);
    P.topRows(delta - eps) = M.bottomRows(delta - eps);
    P.bottomRows(eps) = M.topRows(eps);
    primed.push_back(std::move(P));
  }

  // Schur complement of the linearized Cayley pencil with respect to the
  // identity block of A_0. The eliminated block is constant, so the result
  // stays linear.
  const Eigen::Index out_rows = static_cast<Eigen::Index>(d) * eps + delta - eps;
  const Eigen::Index out_cols = static_cast<Eigen::Index>(d) * eps;
  LinearPencil out(d, out_rows, out_cols);
  const ComplexMatrix I = ComplexMatrix::Identity(eps, eps);
  for (int c = 1; c <= d; ++c) {
    const ComplexMatrix lower = primed[static_cast<size_t>(c)].bottomRows(eps);
    const ComplexMatrix upper = primed[static_cast<size_t>(c)].topRows(delta - eps);
    for (int b = 1; b <= d; ++b) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(b - 1) * eps;
      const Eigen::Index c0 = static_cast<Eigen::Index>(c - 1) * eps;
      // I_eps (x_b + i) on the diagonal plus the lifted bottom rows A_c (x_c - i)
      out.coeff(0).block(r0, c0, eps, eps) +=
          Complex(0, 1) * (b == c ? I : ComplexMatrix::Zero(eps, eps)) - Complex(0, 1) * lower;
      out.coeff(c).block(r0, c0, eps, eps) += lower;
      if (b == c) out.coeff(b).block(r0, c0, eps, eps) += I;
    }
    const Eigen::Index rb = static_cast<Eigen::Index>(d) * eps;
    const Eigen::Index c0 = static_cast<Eigen::Index>(c - 1) * eps;
    out.coeff(0).block(rb, c0, delta - eps, eps) = Complex(0, -1) * upper;
    out.coeff(c).block(rb, c0, delta - eps, eps) = upper;
  }
  return out;
}

StabilityCertificate check_schur(const LinearPencil& L, const ToleranceConfig& cfg,
                                 std::uint64_t seed) {
  StabilityCertificate cert;
  cert.kind = "schur";
  cert.seed = seed;
  const auto reduced = schur_to_stable(L);
  if (!reduced) {
    cert.verdict = Verdict::Unstable;
    cert.detail = "constant term is column-rank deficient";
    const Eigen::Index n = 1;
    MatrixTuple zero;
    for (int j = 0; j < L.vars(); ++j) zero.X.push_back(ComplexMatrix::Zero(n, n));
    cert.witness = std::move(zero);
    return cert;
  }
  StabilityCertificate inner = check_stable(*reduced, cfg);
  inner.kind = "schur";
  inner.seed = seed;
  if (inner.verdict == Verdict::Unstable) {
    WitnessOptions opts;
    opts.mode = WitnessMode::Polydisk;
    opts.seed = seed;
    if (auto w = find_witness(L, opts, cfg)) inner.witness = std::move(w);
  }
  return inner;
}

LinearPencil roesser_pencil(const RoesserSpec& spec) {
  if (spec.A.rows() != spec.A.cols()) throw InputError("roesser: A must be square");
  const Eigen::Index n = spec.A.rows();
  Eigen::Index total = 0;
  for (Eigen::Index dj : spec.dims) {
    if (dj <= 0) throw InputError("roesser: partition entries must be positive");
    total += dj;
  }
  if (total != n) throw InputError("roesser: partition does not sum to the state dimension");
  const int d = static_cast<int>(spec.dims.size());
  LinearPencil out(d, n, n);
  out.coeff(0) = ComplexMatrix::Identity(n, n);
  Eigen::Index at = 0;
  for (int j = 1; j <= d; ++j) {
    const Eigen::Index dj = spec.dims[static_cast<size_t>(j - 1)];
    out.coeff(j) = ComplexMatrix::Zero(n, n);
    out.coeff(j).middleCols(at, dj) = -spec.A.middleCols(at, dj);
    at += dj;
  }
  return out;
}

StabilityCertificate check_roesser(const RoesserSpec& spec, const ToleranceConfig& cfg,
                                   std::uint64_t seed) {
  StabilityCertificate cert = check_schur(roesser_pencil(spec), cfg, seed);
  cert.kind = "roesser";
  const std::string note =
      "relaxation: matricial (stable certifies the scalar Schur polynomial; "
      "unstable refutes only the matricial relaxation)";
  cert.detail = cert.detail.empty() ? note : cert.detail + "; " + note;
  return cert;
}

MatrixTuple cayley(const MatrixTuple& X) {
  MatrixTuple out;
  out.X.reserve(X.X.size());
  for (const auto& x : X.X) {
    const Eigen::Index n = x.rows();
    const ComplexMatrix shift = x + Complex(0, 1) * ComplexMatrix::Identity(n, n);
    Eigen::JacobiSVD<ComplexMatrix> svd(shift);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-14 * std::max(1.0, s(0)))
      throw InputError("cayley: X_j + iI is singular");
    out.X.push_back((x - Complex(0, 1) * ComplexMatrix::Identity(n, n)) *
                    shift.inverse());
  }
  return out;
}

bool verify_certificate_for(const LinearPencil& user_pencil, const StabilityCertificate& cert,
                            const ToleranceConfig& cfg, std::vector<std::string>* reasons,
                            std::vector<VerifyCheck>* table) {
  auto push_fail = [&](const std::string& why) {
    if (reasons) reasons->push_back(why);
    if (table) table->push_back(VerifyCheck{why, 1.0, 0.0, false});
  };

  if (cert.kind == "stable" || cert.kind.empty())
    return verify_certificate(user_pencil, cert, cfg, reasons, table);

  LinearPencil engine = user_pencil;
  if (cert.kind == "hurwitz") {
    engine = hurwitz_to_stable(user_pencil);
  } else if (cert.kind == "schur" || cert.kind == "roesser") {
    const auto reduced = schur_to_stable(user_pencil);
    if (!reduced) {
      // Rank-deficient constant term: only an unstable certificate with a
      // witness inside the polydisk can match.
      if (cert.verdict != Verdict::Unstable || !cert.witness) {
        push_fail("constant term rank deficient but certificate is not unstable-with-witness");
        return false;
      }
      bool ok = true;
      const double res = min_singular_value(eval_pencil(user_pencil, *cert.witness));
      const double bound = cfg.residual_tol * (1.0 + user_pencil.coeff_scale());
      if (table) table->push_back(VerifyCheck{"witness singularity", res, bound, res <= bound});
      if (res > bound) {
        push_fail("witness does not annihilate the pencil");
        ok = false;
      }
      for (const auto& x : cert.witness->X)
        if (spectral_norm(x) >= 1.0) {
          push_fail("witness leaves the open polydisk");
          ok = false;
        }
      return ok;
    }
    engine = *reduced;
  } else {
    push_fail("unknown certificate kind '" + cert.kind + "'");
    return false;
  }

  StabilityCertificate inner = cert;
  inner.witness.reset();
  inner.kind = "stable";
  bool ok = verify_certificate(engine, inner, cfg, reasons, table);

  if (cert.witness) {
    const MatrixTuple& X = *cert.witness;
    const double res = min_singular_value(eval_pencil(user_pencil, X));
    const double bound = cfg.residual_tol * (1.0 + user_pencil.coeff_scale());
    if (table) table->push_back(VerifyCheck{"witness singularity", res, bound, res <= bound});
    if (res > bound) {
      push_fail("witness does not annihilate the pencil");
      ok = false;
    }
    for (size_t j = 0; j < X.X.size(); ++j) {
      bool inside = true;
      if (cert.kind == "hurwitz") {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(real_part(X.X[j]),
                                                         Eigen::EigenvaluesOnly);
        inside = eig.eigenvalues().minCoeff() > 0.0;
      } else {
        inside = spectral_norm(X.X[j]) < 1.0;
      }
      if (!inside) {
        push_fail("witness coordinate " + std::to_string(j + 1) + " leaves the open region");
        ok = false;
      }
    }
  }
  return ok;
}

}  // namespace ncstable
