#include "ncstable/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace ncstable {

Eigen::MatrixXd embed_psd(const ComplexMatrix& M) {
  const ComplexMatrix H = real_part(M);  // hermitize defensively; no-op for hermitian input
  const Eigen::Index n = H.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  const Eigen::MatrixXd S = H.real();
  const Eigen::MatrixXd K = H.imag();
  out.topLeftCorner(n, n) = S;
  out.topRightCorner(n, n) = -K;
  out.bottomLeftCorner(n, n) = K;
  out.bottomRightCorner(n, n) = S;
  return out;
}

ComplexMatrix SdpProblem::unpack(const Eigen::VectorXd& y) const {
  ComplexMatrix D(var_rows, var_cols);
  const Eigen::Index half = var_rows * var_cols;
  for (Eigen::Index r = 0; r < var_rows; ++r)
    for (Eigen::Index c = 0; c < var_cols; ++c) {
      const Eigen::Index i = r * var_cols + c;
      D(r, c) = Complex(y(i), y(half + i));
    }
  return D;
}

SdpProblem build_feasibility_sdp(const LinearPencil& L) {
  if (L.rows() < L.cols())
    throw InputError("build_feasibility_sdp: pencil must have rows >= cols");
  const Eigen::Index delta = L.rows();
  const Eigen::Index eps = L.cols();
  const int d = L.vars();

  SdpProblem p;
  p.var_rows = eps;
  p.var_cols = delta;
  p.scale = L.coeff_scale();
  if (p.scale <= 0.0) p.scale = 1.0;

  const Eigen::Index m = p.num_vars();
  const Eigen::Index half = eps * delta;

  // Products D(e_i) * A_j for every basis direction of the variable space.
  std::vector<std::vector<ComplexMatrix>> prod(static_cast<size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool imag_dir = i >= half;
    const Eigen::Index flat = imag_dir ? i - half : i;
    const Eigen::Index r = flat / delta;
    const Eigen::Index c = flat % delta;
    prod[static_cast<size_t>(i)].reserve(static_cast<size_t>(d) + 1);
    for (int j = 0; j <= d; ++j) {
      // row c of A_j lands in row r of D*A_j
      ComplexMatrix M = ComplexMatrix::Zero(eps, eps);
      M.row(r) = (imag_dir ? Complex(0, 1) : Complex(1, 0)) / p.scale * L.coeff(j).row(c);
      prod[static_cast<size_t>(i)].push_back(std::move(M));
    }
  }

  p.blocks.resize(static_cast<size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) {
    auto& blk = p.blocks[static_cast<size_t>(k)];
    blk.constant = Eigen::MatrixXd::Zero(2 * eps, 2 * eps);
    blk.coeff.reserve(static_cast<size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      const ComplexMatrix& M = prod[static_cast<size_t>(i)][static_cast<size_t>(k)];
      blk.coeff.push_back(embed_psd(k == 0 ? imag_part(M) : real_part(M)));
    }
  }

  // Equalities: imag(D A_j) = 0 for j > 0 (epsilon^2 real rows each), then the
  // trace normalization as the final row.
  const Eigen::Index eq_rows = static_cast<Eigen::Index>(d) * eps * eps + 1;
  p.eq_lhs = Eigen::MatrixXd::Zero(eq_rows, m);
  p.eq_rhs = Eigen::VectorXd::Zero(eq_rows);
  Eigen::Index row = 0;
  for (int j = 1; j <= d; ++j) {
    for (Eigen::Index a = 0; a < eps; ++a)
      for (Eigen::Index b = a; b < eps; ++b) {
        for (Eigen::Index i = 0; i < m; ++i) {
          const Complex e = imag_part(prod[static_cast<size_t>(i)][static_cast<size_t>(j)])(a, b);
          p.eq_lhs(row, i) = e.real();
          if (a != b) p.eq_lhs(row + 1, i) = e.imag();
        }
        row += (a == b) ? 1 : 2;
      }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    double tr = imag_part(prod[static_cast<size_t>(i)][0]).trace().real();
    for (int j = 1; j <= d; ++j)
      tr += real_part(prod[static_cast<size_t>(i)][static_cast<size_t>(j)]).trace().real();
    p.eq_lhs(row, i) = tr;
  }
  p.eq_rhs(row) = 1.0;
  return p;
}

namespace {

struct Reduced {
  // Feasible affine chart y = y0 + C w with the block maps expressed in w.
  Eigen::VectorXd y0;
  Eigen::MatrixXd chart;                          // m x q, orthonormal columns
  std::vector<Eigen::MatrixXd> base;              // block value at w = 0
  std::vector<std::vector<Eigen::MatrixXd>> dir;  // per block, per w coordinate
  Eigen::Index q = 0;
  double total_dim = 0;  // sum of block sizes
  double rho2 = 0;       // norm-cap radius squared in the chart, ||w||^2 < rho2
};

// Solutions needing ||y|| beyond this are cancellation artifacts: the
// trace-normalized products would carry error past any sdp tolerance. Such
// stages arise exactly when the stage pencil sits within solver accuracy of
// an unstable one, so "nothing within the cap" is reported as infeasible.
constexpr double kNormCap = 1e4;

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double rel_tol) {
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(A.cols(), A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > rel_tol * smax) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

bool llt_logdet(const Eigen::MatrixXd& S, double& logdet) {
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return false;
  logdet = 0.0;
  const auto& R = llt.matrixL();
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    const double rii = R(i, i);
    if (!(rii > 0.0) || !std::isfinite(rii)) return false;
    logdet += std::log(rii);
  }
  logdet *= 2.0;
  return true;
}

// Barrier value of max t + mu [sum_k log det(B_k(w) - t I) + log(rho^2 - |w|^2)];
// false outside the domain.
bool barrier_value(const Reduced& R, const Eigen::VectorXd& w, double t, double mu,
                   double& phi) {
  const double gap = R.rho2 - w.squaredNorm();
  if (gap <= 0.0) return false;
  phi = t + mu * std::log(gap);
  for (size_t k = 0; k < R.base.size(); ++k) {
    Eigen::MatrixXd S = R.base[k];
    for (Eigen::Index l = 0; l < R.q; ++l) S += w(l) * R.dir[k][static_cast<size_t>(l)];
    S -= t * Eigen::MatrixXd::Identity(S.rows(), S.cols());
    double logdet = 0.0;
    if (!llt_logdet(S, logdet)) return false;
    phi += mu * logdet;
  }
  return true;
}

double min_block_eig(const Reduced& R, const Eigen::VectorXd& w) {
  double lo = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < R.base.size(); ++k) {
    Eigen::MatrixXd S = R.base[k];
    for (Eigen::Index l = 0; l < R.q; ++l) S += w(l) * R.dir[k][static_cast<size_t>(l)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace

SdpOutcome solve(const SdpProblem& problem, const ToleranceConfig& cfg) {
  SdpOutcome out;
  const Eigen::Index m = problem.num_vars();
  if (problem.blocks.empty() || m == 0) {
    out.reason = "empty problem";
    return out;
  }

  // Min-norm solution of the equalities; inconsistency is an analytic
  // infeasibility certificate (e.g. the trace functional vanishes on the
  // admissible subspace).
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(m, m);
  if (problem.eq_lhs.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(problem.eq_lhs,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-11);
    y0 = svd.solve(problem.eq_rhs);
    const double res = (problem.eq_lhs * y0 - problem.eq_rhs).norm();
    if (res > 1e-8 * (1.0 + problem.eq_rhs.norm())) {
      out.status = SdpStatus::Infeasible;
      out.reason = "equality constraints inconsistent (trace functional vanishes on the "
                   "admissible subspace)";
      return out;
    }
    // The trace normalization needs solutions of norm 1/||tau||; a huge
    // minimum-norm solution means the functional is degenerate at working
    // precision, the same rank decision as the residual test above.
    if (y0.norm() > 0.5 * kNormCap) {
      out.status = SdpStatus::Infeasible;
      out.reason = "equality constraints inconsistent (trace functional numerically "
                   "degenerate on the admissible subspace)";
      return out;
    }
    N = nullspace(problem.eq_lhs, 1e-11);
  }

  // Quotient out chart directions that do not move any block.
  Eigen::Index block_entries = 0;
  for (const auto& blk : problem.blocks) block_entries += blk.constant.size();
  Eigen::MatrixXd phi_map(block_entries, N.cols());
  for (Eigen::Index l = 0; l < N.cols(); ++l) {
    Eigen::Index at = 0;
    for (const auto& blk : problem.blocks) {
      Eigen::MatrixXd img = Eigen::MatrixXd::Zero(blk.constant.rows(), blk.constant.cols());
      for (Eigen::Index i = 0; i < m; ++i)
        if (N(i, l) != 0.0) img += N(i, l) * blk.coeff[static_cast<size_t>(i)];
      phi_map.col(l).segment(at, img.size()) = Eigen::Map<Eigen::VectorXd>(img.data(), img.size());
      at += img.size();
    }
  }
  Eigen::MatrixXd W(N.cols(), 0);
  if (phi_map.size() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi_map, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (smax > 0.0 && s(i) > 1e-12 * smax) ++rank;
    W = svd.matrixV().leftCols(rank);
  }

  Reduced R;
  R.chart = N * W;
  R.q = R.chart.cols();
  R.y0 = y0;
  R.base.reserve(problem.blocks.size());
  R.dir.resize(problem.blocks.size());
  for (size_t k = 0; k < problem.blocks.size(); ++k) {
    R.base.push_back(problem.blocks[k].at(y0));
    R.total_dim += static_cast<double>(problem.blocks[k].constant.rows());
    R.dir[k].reserve(static_cast<size_t>(R.q));
    for (Eigen::Index l = 0; l < R.q; ++l) {
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(R.base[k].rows(), R.base[k].cols());
      for (Eigen::Index i = 0; i < m; ++i)
        if (R.chart(i, l) != 0.0) D += R.chart(i, l) * problem.blocks[k].coeff[static_cast<size_t>(i)];
      R.dir[k].push_back(std::move(D));
    }
  }

  auto finish_feasible = [&](const Eigen::VectorXd& w) -> SdpOutcome {
    Eigen::VectorXd y = R.y0 + R.chart * w;
    SdpOutcome res;
    res.psd_residual = std::max(0.0, -min_block_eig(R, w));
    res.eq_residual = problem.eq_lhs.rows() > 0
                          ? (problem.eq_lhs * y - problem.eq_rhs).cwiseAbs().maxCoeff()
                          : 0.0;
    if (problem.eq_lhs.rows() > 0)
      res.trace_residual = std::abs(problem.eq_lhs.bottomRows(1).row(0).dot(y) -
                                    problem.eq_rhs(problem.eq_rhs.size() - 1));
    // Builder pre-normalized the coefficients, so 1 + ||L|| == 2 here.
    const double tol = 2.0 * cfg.sdp_tol;
    if (res.psd_residual > tol || res.eq_residual > tol) {
      res.status = SdpStatus::Indeterminate;
      res.reason = "candidate solution failed residual certification";
      return res;
    }
    res.status = SdpStatus::Feasible;
    res.D = problem.unpack(y) / problem.scale;
    return res;
  };

  // Fully determined case: the blocks are constant on the admissible set.
  if (R.q == 0) {
    const double lo = min_block_eig(R, Eigen::VectorXd::Zero(0));
    if (lo >= -cfg.sdp_tol) return finish_feasible(Eigen::VectorXd::Zero(0));
    out.status = SdpStatus::Infeasible;
    out.reason = "analytically reduced system violates positive semidefiniteness";
    return out;
  }

  // Interior-point phase: maximize t s.t. B_k(w) >= t I and ||y|| below the
  // norm cap, with the equalities already eliminated. Strictly feasible in
  // (w, t) whenever the chart is nonempty, and compact thanks to the cap.
  R.rho2 = kNormCap * kNormCap - y0.squaredNorm();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(R.q);
  double t = min_block_eig(R, w) - 1.0;
  const double nu = R.total_dim + 2.0;
  const double feas_exit = std::max(1e-6, 10.0 * cfg.sdp_tol);
  const double mu_end = 0.25 * cfg.sdp_tol / nu;
  double mu = 1.0;

  const Eigen::Index dim = R.q + 1;
  bool stalled = false;
  for (int outer = 0; outer < 200 && !stalled; ++outer) {
    for (int inner = 0; inner < 80; ++inner) {
      // Assemble gradient and Hessian of the barrier at (w, t).
      Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
      g(R.q) = 1.0;
      bool ok = true;
      for (size_t k = 0; k < R.base.size() && ok; ++k) {
        Eigen::MatrixXd S = R.base[k];
        for (Eigen::Index l = 0; l < R.q; ++l) S += w(l) * R.dir[k][static_cast<size_t>(l)];
        S -= t * Eigen::MatrixXd::Identity(S.rows(), S.cols());
        Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success) {
          ok = false;
          break;
        }
        const Eigen::MatrixXd A =
            llt.solve(Eigen::MatrixXd::Identity(S.rows(), S.cols()));
        std::vector<Eigen::MatrixXd> AF(static_cast<size_t>(R.q));
        for (Eigen::Index l = 0; l < R.q; ++l) AF[static_cast<size_t>(l)] = A * R.dir[k][static_cast<size_t>(l)];
        for (Eigen::Index l = 0; l < R.q; ++l) {
          g(l) += mu * AF[static_cast<size_t>(l)].trace();
          for (Eigen::Index l2 = l; l2 < R.q; ++l2) {
            const double v = -mu * (AF[static_cast<size_t>(l)].cwiseProduct(
                                        AF[static_cast<size_t>(l2)].transpose()))
                                       .sum();
            H(l, l2) += v;
            if (l2 != l) H(l2, l) += v;
          }
          H(l, R.q) += mu * (AF[static_cast<size_t>(l)].cwiseProduct(A.transpose())).sum();
          H(R.q, l) = H(l, R.q);
        }
        g(R.q) -= mu * A.trace();
        H(R.q, R.q) -= mu * (A.cwiseProduct(A.transpose())).sum();
      }
      if (ok) {
        // norm-cap barrier term log(rho^2 - |w|^2)
        const double gap = R.rho2 - w.squaredNorm();
        if (gap <= 0.0) {
          ok = false;
        } else {
          g.head(R.q) -= mu * 2.0 / gap * w;
          H.topLeftCorner(R.q, R.q) -=
              mu * (2.0 / gap * Eigen::MatrixXd::Identity(R.q, R.q) +
                    4.0 / (gap * gap) * w * w.transpose());
        }
      }
      if (!ok) {
        stalled = true;
        break;
      }

      Eigen::MatrixXd negH = -H;
      negH.diagonal().array() += 1e-13 * (1.0 + negH.diagonal().cwiseAbs().maxCoeff());
      Eigen::LDLT<Eigen::MatrixXd> ldlt(negH);
      Eigen::VectorXd step = ldlt.solve(g);
      const double decrement = g.dot(step);
      if (!std::isfinite(decrement) || decrement < 0) {
        stalled = true;
        break;
      }
      if (decrement <= 1e-10) break;

      double phi0 = 0.0;
      barrier_value(R, w, t, mu, phi0);
      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::VectorXd w_new = w + alpha * step.head(R.q);
        const double t_new = t + alpha * step(R.q);
        double phi_new = 0.0;
        if (barrier_value(R, w_new, t_new, mu, phi_new) &&
            phi_new >= phi0 + 1e-4 * alpha * decrement) {
          w = std::move(w_new);
          t = t_new;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        stalled = true;
        break;
      }
    }

    if (t >= feas_exit) return finish_feasible(w);
    if (t + mu * nu < -feas_exit) break;  // go attempt the dual certificate
    if (mu <= mu_end) break;
    mu = std::max(mu * 0.2, mu_end);
  }

  const double t_hi = t + mu * nu;
  if (t >= -cfg.sdp_tol) return finish_feasible(w);

  if (t_hi < -cfg.sdp_tol) {
    // Farkas certificate from the barrier multipliers Z_k = mu (B_k - tI)^{-1}:
    // PSD by construction; if sum_k <F_ki, Z_k> lies in the row space of the
    // equalities with value lambda^T rhs < 0, no feasible point can exist.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
    double zscale = 0.0;
    bool dual_ok = true;
    for (size_t k = 0; k < problem.blocks.size(); ++k) {
      Eigen::MatrixXd S = R.base[k];
      for (Eigen::Index l = 0; l < R.q; ++l) S += w(l) * R.dir[k][static_cast<size_t>(l)];
      S -= t * Eigen::MatrixXd::Identity(S.rows(), S.cols());
      Eigen::LLT<Eigen::MatrixXd> llt(S);
      if (llt.info() != Eigen::Success) {
        dual_ok = false;
        break;
      }
      const Eigen::MatrixXd Z =
          mu * llt.solve(Eigen::MatrixXd::Identity(S.rows(), S.cols()));
      zscale += Z.trace();
      for (Eigen::Index i = 0; i < m; ++i)
        q(i) += (problem.blocks[k].coeff[static_cast<size_t>(i)].cwiseProduct(Z)).sum();
    }
    if (dual_ok && zscale > 0.0) {
      q /= zscale;
      Eigen::VectorXd lambda =
          problem.eq_lhs.transpose().colPivHouseholderQr().solve(q);
      const double proj_res = (problem.eq_lhs.transpose() * lambda - q).norm();
      const double value = lambda.dot(problem.eq_rhs);
      // Residual enters the Farkas contradiction multiplied by the feasible
      // norm, so accept it relative to the certificate value.
      const double slack = std::max(1e-8 * (1.0 + q.norm()), 1e-4 * std::abs(value));
      if (proj_res <= slack && value < -0.5 * cfg.sdp_tol) {
        out.status = SdpStatus::Infeasible;
        out.reason = "dual improving ray verified";
        return out;
      }
    }
    if (!stalled) {
      // The capped problem is solved to optimality with a negative value, so
      // nothing within the norm cap is feasible; anything beyond it would be
      // a cancellation artifact at working precision.
      out.status = SdpStatus::Infeasible;
      out.reason = "no solution within the norm cap (infeasible at working precision)";
      return out;
    }
    out.status = SdpStatus::Indeterminate;
    out.reason = "infeasibility suspected but dual certificate not verified";
    return out;
  }

  out.status = SdpStatus::Indeterminate;
  out.reason = stalled ? "interior-point iteration stalled near the feasibility boundary"
                       : "max-min-eigenvalue value too close to zero to classify";
  return out;
}

}  // namespace ncstable
