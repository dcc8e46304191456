#include "ncstable/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace ncstable {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    default: return "indeterminate";
  }
}

LinearPencil PurelyStableData::to_pencil() const {
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(P.size());
  coeffs.push_back(H + Complex(0, 1) * P.at(0));
  for (size_t j = 1; j < P.size(); ++j) coeffs.push_back(P[j]);
  return LinearPencil::from_coeffs(std::move(coeffs));
}

namespace {

PurelyStableData split_pencil_data(const LinearPencil& M) {
  PurelyStableData d;
  d.H = real_part(M.coeff(0));
  d.P.push_back(imag_part(M.coeff(0)));
  for (int j = 1; j <= M.vars(); ++j) d.P.push_back(real_part(M.coeff(j)));
  return d;
}

// Kernel decisions on SDP products carry the solver accuracy, not the input
// accuracy; loosen the rank threshold accordingly.
ToleranceConfig kernel_cfg(const ToleranceConfig& cfg) {
  ToleranceConfig k = cfg;
  k.rank_tol = std::max(cfg.rank_tol, 10.0 * cfg.sdp_tol);
  return k;
}

ComplexMatrix coefficient_stack(const LinearPencil& L) {
  ComplexMatrix stacked(L.rows(), (L.vars() + 1) * L.cols());
  for (int j = 0; j <= L.vars(); ++j)
    stacked.middleCols(static_cast<Eigen::Index>(j) * L.cols(), L.cols()) = L.coeff(j);
  return stacked;
}

std::vector<ComplexMatrix> stage_products(const ComplexMatrix& D, const LinearPencil& L) {
  std::vector<ComplexMatrix> prods;
  prods.reserve(static_cast<size_t>(L.vars()) + 1);
  for (int j = 0; j <= L.vars(); ++j) prods.push_back(D * L.coeff(j));
  return prods;
}

}  // namespace

std::optional<PurelyStableData> is_purely_stable(const LinearPencil& L,
                                                 const ToleranceConfig& cfg) {
  if (!L.square()) throw InputError("is_purely_stable: pencil must be square");
  PurelyStableData data = split_pencil_data(L);
  if (!is_psd(imag_part(L.coeff(0)), cfg)) return std::nullopt;
  for (int j = 1; j <= L.vars(); ++j)
    if (!is_psd(L.coeff(j), cfg)) return std::nullopt;
  std::vector<ComplexMatrix> stacked;
  stacked.push_back(data.H);
  for (const auto& p : data.P) stacked.push_back(p);
  if (joint_kernel(stacked, cfg).cols() != 0) return std::nullopt;
  return data;
}

StabilityCertificate check_stable(const LinearPencil& input, const ToleranceConfig& cfg) {
  StabilityCertificate cert;
  LinearPencil stage = input;
  if (stage.rows() < stage.cols()) {
    stage = transpose_pencil(stage);
    cert.transposed = true;
  }
  const ToleranceConfig kcfg = kernel_cfg(cfg);
  const Eigen::Index max_stages = stage.cols();

  for (Eigen::Index it = 0; it <= max_stages; ++it) {
    // Compress rows onto sum_j ran A_j; too few independent rows refutes
    // full column rank outright.
    const ComplexMatrix U = column_space_basis(coefficient_stack(stage), cfg);
    if (U.cols() < stage.cols()) {
      cert.verdict = Verdict::Unstable;
      std::ostringstream msg;
      msg << "stage " << cert.stages.size() << ": coefficient range has dimension "
          << U.cols() << " < " << stage.cols() << " columns";
      cert.detail = msg.str();
      return cert;
    }
    const LinearPencil compressed = mul_left(U.adjoint(), stage);

    const SdpOutcome outcome = solve(build_feasibility_sdp(compressed), cfg);
    if (outcome.status == SdpStatus::Infeasible) {
      cert.verdict = Verdict::Unstable;
      cert.infeasible_stage = static_cast<int>(cert.stages.size());
      cert.detail = "stage " + std::to_string(cert.stages.size()) +
                    " SDP infeasible: " + outcome.reason;
      return cert;
    }
    if (outcome.status == SdpStatus::Indeterminate) {
      cert.verdict = Verdict::Indeterminate;
      cert.detail = "stage " + std::to_string(cert.stages.size()) + ": " + outcome.reason;
      return cert;
    }

    const ComplexMatrix D = outcome.D * U.adjoint();  // lift to the uncompressed frame
    const ComplexMatrix V = joint_kernel(stage_products(D, stage), kcfg);
    cert.stages.push_back(StageRecord{D, V, stage.rows(), stage.cols()});

    if (V.cols() == 0) {
      const LinearPencil block = mul_left(D, stage);
      auto data = is_purely_stable(block, cfg);
      if (!data) {
        cert.verdict = Verdict::Indeterminate;
        cert.detail = "final stage product failed the purely-stable check";
        return cert;
      }
      cert.final_block = std::move(*data);
      cert.verdict = Verdict::Stable;
      return cert;
    }
    if (V.cols() >= stage.cols()) {
      cert.verdict = Verdict::Indeterminate;
      cert.detail = "stage kernel did not shrink (trace normalization violated numerically)";
      return cert;
    }
    stage = mul_right(stage, V);
  }

  cert.verdict = Verdict::Indeterminate;
  cert.detail = "stage limit exceeded";
  return cert;
}

StabilityCertificate::Triangular assemble_triangular(const LinearPencil& L,
                                                     const StabilityCertificate& cert) {
  if (cert.verdict != Verdict::Stable || cert.stages.empty())
    throw InputError("assemble_triangular: requires a stable certificate with stages");
  if (cert.stages.back().V.cols() != 0)
    throw InputError("assemble_triangular: last stage kernel must be trivial");

  LinearPencil oriented = cert.transposed ? transpose_pencil(L) : L;
  std::vector<LinearPencil> chain{oriented};
  for (size_t i = 0; i + 1 < cert.stages.size(); ++i)
    chain.push_back(mul_right(chain.back(), cert.stages[i].V));
  for (size_t i = 0; i < cert.stages.size(); ++i)
    if (chain[i].rows() != cert.stages[i].stage_rows ||
        chain[i].cols() != cert.stages[i].stage_cols)
      throw InputError("assemble_triangular: stage dimensions do not match the pencil");

  const size_t last = cert.stages.size() - 1;
  ComplexMatrix D_total = cert.stages[last].D;
  ComplexMatrix E_total = ComplexMatrix::Identity(chain[last].cols(), chain[last].cols());
  std::vector<PurelyStableData> blocks{split_pencil_data(mul_left(D_total, chain[last]))};

  for (size_t ii = last; ii-- > 0;) {
    const StageRecord& st = cert.stages[ii];
    const Eigen::Index eps = chain[ii].cols();
    const ComplexMatrix Q1 = orthogonal_complement(st.V, eps);
    ComplexMatrix D_new(eps, chain[ii].rows());
    D_new.topRows(Q1.cols()) = Q1.adjoint() * st.D;
    D_new.bottomRows(D_total.rows()) = D_total;
    ComplexMatrix Q(eps, eps);
    Q.leftCols(Q1.cols()) = Q1;
    Q.rightCols(st.V.cols()) = st.V;
    ComplexMatrix E_inner = ComplexMatrix::Zero(eps, eps);
    E_inner.topLeftCorner(Q1.cols(), Q1.cols()) =
        ComplexMatrix::Identity(Q1.cols(), Q1.cols());
    E_inner.bottomRightCorner(E_total.rows(), E_total.cols()) = E_total;
    const LinearPencil corner =
        mul_right(mul_left(ComplexMatrix(Q1.adjoint() * st.D), chain[ii]), Q1);
    blocks.insert(blocks.begin(), split_pencil_data(corner));
    D_total = std::move(D_new);
    E_total = Q * E_inner;
  }

  return StabilityCertificate::Triangular{std::move(D_total), std::move(E_total),
                                          std::move(blocks)};
}

namespace {

struct Verifier {
  const ToleranceConfig& cfg;
  std::vector<std::string>* reasons;
  std::vector<VerifyCheck>* table;
  bool ok = true;

  void check(const std::string& name, double residual, double bound) {
    const bool pass = residual <= bound;
    if (!pass) {
      ok = false;
      if (reasons) {
        std::ostringstream msg;
        msg << name << ": residual " << residual << " exceeds " << bound;
        reasons->push_back(msg.str());
      }
    }
    if (table) table->push_back(VerifyCheck{name, residual, bound, pass});
  }

  void fail(const std::string& why) {
    ok = false;
    if (reasons) reasons->push_back(why);
    if (table) table->push_back(VerifyCheck{why, 1.0, 0.0, false});
  }
};

double min_eig(const ComplexMatrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(real_part(hermitian),
                                                   Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double rank_gap(const ComplexMatrix& M, Eigen::Index wanted_rank) {
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() < wanted_rank || s(0) == 0.0) return 0.0;
  return s(wanted_rank - 1) / s(0);
}

void verify_certificate_impl(const LinearPencil& input, const StabilityCertificate& cert,
                             const ToleranceConfig& cfg, Verifier& v);

}  // namespace

bool verify_certificate(const LinearPencil& input, const StabilityCertificate& cert,
                        const ToleranceConfig& cfg, std::vector<std::string>* reasons,
                        std::vector<VerifyCheck>* table) {
  Verifier v{cfg, reasons, table};
  try {
    verify_certificate_impl(input, cert, cfg, v);
  } catch (const std::exception& e) {
    v.fail(std::string("verification aborted: ") + e.what());
  }
  return v.ok;
}

namespace {

void verify_certificate_impl(const LinearPencil& input, const StabilityCertificate& cert,
                             const ToleranceConfig& cfg, Verifier& v) {
  const LinearPencil oriented = cert.transposed ? transpose_pencil(input) : input;
  const double scale = 1.0 + oriented.coeff_scale();
  const ToleranceConfig kcfg = kernel_cfg(cfg);

  // Stage chain.
  std::vector<LinearPencil> chain;
  if (!cert.stages.empty()) {
    chain.push_back(oriented);
    for (size_t i = 0; i + 1 < cert.stages.size(); ++i) {
      if (cert.stages[i].V.cols() == 0 ||
          cert.stages[i].V.rows() != chain.back().cols()) {
        v.fail("stage " + std::to_string(i) +
               " kernel basis is trivial or dimensionally inconsistent but not last");
        break;
      }
      chain.push_back(mul_right(chain.back(), cert.stages[i].V));
    }
  }
  if (chain.size() == cert.stages.size()) {
    for (size_t i = 0; i < cert.stages.size(); ++i) {
      const StageRecord& st = cert.stages[i];
      const LinearPencil& Li = chain[i];
      const std::string tag = "stage " + std::to_string(i);
      if (Li.rows() != st.stage_rows || Li.cols() != st.stage_cols ||
          st.D.rows() != Li.cols() || st.D.cols() != Li.rows()) {
        v.fail(tag + ": dimensions do not match the recorded pencil chain");
        continue;
      }
      const double sdp_bound = 10.0 * cfg.sdp_tol * (1.0 + Li.coeff_scale());
      const auto prods = stage_products(st.D, Li);
      v.check(tag + " imag(D A_0) psd", std::max(0.0, -min_eig(imag_part(prods[0]))),
              sdp_bound);
      double tr = imag_part(prods[0]).trace().real();
      for (int j = 1; j <= Li.vars(); ++j) {
        v.check(tag + " real(D A_" + std::to_string(j) + ") psd",
                std::max(0.0, -min_eig(real_part(prods[static_cast<size_t>(j)]))), sdp_bound);
        v.check(tag + " imag(D A_" + std::to_string(j) + ") = 0",
                imag_part(prods[static_cast<size_t>(j)]).norm(), sdp_bound);
        tr += real_part(prods[static_cast<size_t>(j)]).trace().real();
      }
      v.check(tag + " trace normalization", std::abs(tr - 1.0), sdp_bound);

      if (st.V.cols() > 0)
        v.check(tag + " kernel basis orthonormal",
                (st.V.adjoint() * st.V -
                 ComplexMatrix::Identity(st.V.cols(), st.V.cols()))
                    .norm(),
                1e-8);
      const ComplexMatrix K = joint_kernel(prods, kcfg);
      if (K.cols() != st.V.cols())
        v.fail(tag + ": recomputed joint kernel dimension " + std::to_string(K.cols()) +
               " != recorded " + std::to_string(st.V.cols()));
      else if (st.V.cols() > 0)
        v.check(tag + " kernel span", span_distance(K, st.V), cfg.residual_tol);
    }
  } else if (!cert.stages.empty()) {
    // chain construction already failed above
  }

  if (cert.verdict == Verdict::Stable) {
    if (cert.stages.empty() && !cert.triangular)
      v.fail("stable certificate carries neither stages nor triangular data");
    if (!cert.stages.empty() && chain.size() == cert.stages.size()) {
      if (cert.stages.back().V.cols() != 0)
        v.fail("stable certificate whose last stage kernel is nontrivial");
      else {
        const LinearPencil last = mul_left(cert.stages.back().D, chain.back());
        if (!is_purely_stable(last, cfg))
          v.fail("final stage product is not purely stable");
      }
    }
  }

  if (cert.verdict == Verdict::Unstable) {
    if (cert.witness) {
      const MatrixTuple& X = *cert.witness;
      if (X.vars() != input.vars())
        v.fail("witness variable count mismatch");
      else {
        v.check("witness singularity", min_singular_value(eval_pencil(input, X)),
                cfg.residual_tol * scale);
        for (int j = 0; j < X.vars(); ++j) {
          bool inside = true;
          if (cert.kind == "hurwitz")
            inside = min_eig(real_part(X.X[static_cast<size_t>(j)])) > 0.0;
          else if (cert.kind == "schur" || cert.kind == "roesser")
            inside = spectral_norm(X.X[static_cast<size_t>(j)]) < 1.0;
          else
            inside = min_eig(imag_part(X.X[static_cast<size_t>(j)])) > 0.0;
          if (!inside) v.fail("witness coordinate " + std::to_string(j + 1) + " leaves the open region");
        }
      }
    } else if (chain.size() == cert.stages.size()) {
      // No witness: recheck the recorded refutation at the failing stage.
      LinearPencil next = cert.stages.empty()
                              ? oriented
                              : mul_right(chain.back(), cert.stages.back().V);
      const ComplexMatrix U = column_space_basis(coefficient_stack(next), cfg);
      if (U.cols() < next.cols()) {
        if (v.table)
          v.table->push_back(VerifyCheck{"row deficiency at failing stage", 0.0, 0.0, true});
      } else {
        const SdpOutcome oc = solve(build_feasibility_sdp(mul_left(U.adjoint(), next)), cfg);
        if (oc.status != SdpStatus::Infeasible)
          v.fail("recorded infeasible stage did not reproduce infeasibility");
        else if (v.table)
          v.table->push_back(VerifyCheck{"sdp infeasibility at failing stage", 0.0, 0.0, true});
      }
    }
  }

  if (cert.triangular) {
    const auto& tri = *cert.triangular;
    if (cert.verdict != Verdict::Stable) v.fail("triangular data on a non-stable certificate");
    Eigen::Index total = 0;
    for (const auto& b : tri.blocks) total += b.H.rows();
    if (total != oriented.cols() || tri.D.rows() != oriented.cols() ||
        tri.D.cols() != oriented.rows() || tri.E.rows() != oriented.cols() ||
        tri.E.cols() != oriented.cols()) {
      v.fail("triangular data dimensions inconsistent with the pencil");
    } else {
      v.check("D_total full rank", cfg.rank_tol - rank_gap(tri.D, tri.D.rows()), 0.0);
      v.check("E_total full rank", cfg.rank_tol - rank_gap(tri.E, tri.E.rows()), 0.0);
      const LinearPencil T = mul_right(mul_left(tri.D, oriented), tri.E);
      const double bound = cfg.residual_tol * scale;
      double upper = 0.0;
      Eigen::Index r0 = 0;
      for (size_t bi = 0; bi < tri.blocks.size(); ++bi) {
        const Eigen::Index nb = tri.blocks[bi].H.rows();
        Eigen::Index c0 = r0 + nb;
        for (int j = 0; j <= T.vars(); ++j)
          if (c0 < T.cols())
            upper = std::max(upper, T.coeff(j).block(r0, c0, nb, T.cols() - c0).norm());
        const LinearPencil diag = block(T, r0, r0, nb, nb);
        const LinearPencil stored = tri.blocks[bi].to_pencil();
        double mismatch = 0.0;
        for (int j = 0; j <= T.vars(); ++j)
          mismatch = std::max(mismatch, (diag.coeff(j) - stored.coeff(j)).norm());
        v.check("diagonal block " + std::to_string(bi) + " matches", mismatch, bound);
        if (!is_purely_stable(stored, cfg))
          v.fail("diagonal block " + std::to_string(bi) + " is not purely stable");
        r0 += nb;
      }
      v.check("strictly upper part vanishes", upper, bound);
    }
  }
}

}  // namespace

bool is_irreducible(const LinearPencil& L, const ToleranceConfig& cfg) {
  if (!L.square()) throw InputError("is_irreducible: pencil must be square");
  const Eigen::Index n = L.rows();
  Eigen::JacobiSVD<ComplexMatrix> svd(L.coeff(0), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= cfg.rank_tol * s(0))
    throw InputError("is_irreducible: constant term is singular");
  const ComplexMatrix A0inv = svd.solve(ComplexMatrix::Identity(n, n));

  std::vector<ComplexMatrix> gens;
  for (int j = 1; j <= L.vars(); ++j) gens.push_back(L.coeff(j) * A0inv);

  const Eigen::Index full = n * n;
  std::vector<Eigen::VectorXcd> basis;  // orthonormal, vectorized
  auto add = [&](const ComplexMatrix& M) -> bool {
    Eigen::VectorXcd vec = Eigen::Map<const Eigen::VectorXcd>(M.data(), M.size());
    const double orig = vec.norm();
    if (orig == 0.0) return false;
    for (const auto& b : basis) vec -= b.dot(vec) * b;
    // repeat once for numerical orthogonality
    for (const auto& b : basis) vec -= b.dot(vec) * b;
    if (vec.norm() <= std::max(cfg.rank_tol, 1e-10) * orig) return false;
    basis.push_back(vec.normalized());
    return true;
  };

  std::vector<ComplexMatrix> frontier{ComplexMatrix::Identity(n, n)};
  add(frontier.front());
  for (Eigen::Index depth = 0; depth < full && !frontier.empty() &&
                               static_cast<Eigen::Index>(basis.size()) < full;
       ++depth) {
    std::vector<ComplexMatrix> next;
    for (const auto& g : gens)
      for (const auto& f : frontier) {
        ComplexMatrix prod = g * f;
        if (add(prod)) next.push_back(std::move(prod));
      }
    frontier = std::move(next);
  }
  return static_cast<Eigen::Index>(basis.size()) == full;
}

StabilityCertificate check_hermitian_stable(const LinearPencil& L,
                                            const ToleranceConfig& cfg) {
  const double tol = cfg.psd_tol * (1.0 + L.coeff_scale());
  if (!is_hermitian_pencil(L, tol))
    throw InputError("check_hermitian_stable: pencil is not hermitian");
  if (!is_irreducible(L, cfg))
    throw InputError("check_hermitian_stable: pencil is not irreducible");

  StabilityCertificate cert;
  const Eigen::Index n = L.rows();
  for (int sign : {+1, -1}) {
    const LinearPencil candidate = sign > 0 ? L : -L;
    if (auto data = is_purely_stable(candidate, cfg)) {
      cert.verdict = Verdict::Stable;
      cert.hermitian_sign = sign;
      cert.final_block = *data;
      ComplexMatrix D = static_cast<double>(sign) * ComplexMatrix::Identity(n, n);
      cert.triangular = StabilityCertificate::Triangular{
          D, ComplexMatrix::Identity(n, n), {std::move(*data)}};
      cert.detail = sign > 0 ? "L purely stable" : "-L purely stable";
      return cert;
    }
  }
  cert.verdict = Verdict::Unstable;
  cert.detail = "hermitian irreducible pencil with neither sign purely stable";
  return cert;
}

std::optional<MatrixTuple> find_witness(const LinearPencil& L, WitnessMode mode, long budget,
                                        std::uint64_t seed, const ToleranceConfig& cfg) {
  WitnessOptions opts;
  opts.mode = mode;
  opts.budget = budget;
  opts.seed = seed;
  return find_witness(L, opts, cfg);
}

}  // namespace ncstable
