#pragma once

#include <optional>
#include <vector>

#include "ncstable/core.hpp"
#include "ncstable/stability.hpp"

namespace ncstable {

/// Substitutes x_j -> -i x_j: L is Hurwitz stable iff the result is stable.
LinearPencil hurwitz_to_stable(const LinearPencil& L);

/// Stability on tuples with positive definite real parts.
StabilityCertificate check_hurwitz(const LinearPencil& L, const ToleranceConfig& cfg,
                                   std::uint64_t seed = 0);

/// Linearized Cayley reduction: nullopt when A_0 is column-rank deficient
/// (then L is immediately not Schur stable); otherwise a pencil of size
/// (d eps + delta - eps) x (d eps) that is stable iff L is Schur stable.
std::optional<LinearPencil> schur_to_stable(const LinearPencil& L);

/// Stability on the noncommutative polydisk.
StabilityCertificate check_schur(const LinearPencil& L, const ToleranceConfig& cfg,
                                 std::uint64_t seed = 0);

/// Roesser state matrix with the state partition delta_1, ..., delta_d.
struct RoesserSpec {
  ComplexMatrix A;
  std::vector<Eigen::Index> dims;
};

/// I - A (directsum_j I_{delta_j} x_j); its scalar determinant is the
/// denominator of the model's transfer function.
LinearPencil roesser_pencil(const RoesserSpec& spec);

/// Schur stability of the Roesser pencil (matricial relaxation of the scalar
/// Schur question; a stable verdict certifies the scalar polynomial).
StabilityCertificate check_roesser(const RoesserSpec& spec, const ToleranceConfig& cfg,
                                   std::uint64_t seed = 0);

/// Componentwise (X_j - iI)(X_j + iI)^{-1}; maps the matricial upper half
/// onto the polydisk.
MatrixTuple cayley(const MatrixTuple& X);

/// Kind-aware certificate verification: applies the certificate's reduction
/// to the user's pencil before checking stages, and checks the witness in the
/// region that matches the certificate kind.
bool verify_certificate_for(const LinearPencil& user_pencil, const StabilityCertificate& cert,
                            const ToleranceConfig& cfg,
                            std::vector<std::string>* reasons = nullptr,
                            std::vector<VerifyCheck>* table = nullptr);

}  // namespace ncstable
