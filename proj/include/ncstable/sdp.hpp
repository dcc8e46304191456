#pragma once

#include <string>
#include <vector>

#include "ncstable/core.hpp"
#include "ncstable/numerics.hpp"

namespace ncstable {

/// Real symmetric embedding [[S, -K], [K, S]] of a hermitian M = S + iK.
/// M is PSD iff the embedding is PSD; eigenvalues appear doubled.
Eigen::MatrixXd embed_psd(const ComplexMatrix& M);

/// Feasibility SDP over D in C^{var_rows x var_cols}, represented by the real
/// vector y = [Re(D) row-major, Im(D) row-major]. PSD constraints are affine
/// maps y -> real symmetric matrices; equalities are rows of eq_lhs y = eq_rhs
/// (the trace normalization is one of them).
struct SdpProblem {
  struct AffineBlock {
    Eigen::MatrixXd constant;            // symmetric
    std::vector<Eigen::MatrixXd> coeff;  // one symmetric matrix per variable

    Eigen::MatrixXd at(const Eigen::VectorXd& y) const {
      Eigen::MatrixXd out = constant;
      for (size_t i = 0; i < coeff.size(); ++i) out += y(static_cast<Eigen::Index>(i)) * coeff[i];
      return out;
    }
  };

  Eigen::Index var_rows = 0, var_cols = 0;
  std::vector<AffineBlock> blocks;
  Eigen::MatrixXd eq_lhs;
  Eigen::VectorXd eq_rhs;
  double scale = 1.0;  // coefficient normalization applied by the builder

  Eigen::Index num_vars() const { return 2 * var_rows * var_cols; }
  ComplexMatrix unpack(const Eigen::VectorXd& y) const;
};

enum class SdpStatus { Feasible, Infeasible, Indeterminate };

struct SdpOutcome {
  SdpStatus status = SdpStatus::Indeterminate;
  ComplexMatrix D;  // set when Feasible, in the caller's original units
  double psd_residual = 0.0;
  double eq_residual = 0.0;
  double trace_residual = 0.0;
  std::string reason;

  bool feasible() const { return status == SdpStatus::Feasible; }
};

/// Encodes, for unknown D in C^{cols x rows} of the pencil:
///   imag(D A_0) >= 0, real(D A_j) >= 0 (j > 0),
///   tr(imag(D A_0) + sum_j real(D A_j)) = 1, imag(D A_j) = 0 (j > 0).
/// Requires rows >= cols (caller orients).
SdpProblem build_feasibility_sdp(const LinearPencil& L);

/// Log-barrier path following on the max-min-eigenvalue reformulation.
/// Feasible only with certified residuals; Infeasible only with a verified
/// dual improving ray or an inconsistent analytic reduction; otherwise
/// Indeterminate.
SdpOutcome solve(const SdpProblem& problem, const ToleranceConfig& cfg);

}  // namespace ncstable
