#pragma once

#include <optional>
#include <vector>

#include "ncstable/core.hpp"
#include "ncstable/stability.hpp"

namespace ncstable {

/// Descriptor realization c^* (I - sum_j A_j x_j)^{-1} b.
struct DescriptorRealization {
  Eigen::VectorXcd c, b;
  std::vector<ComplexMatrix> A;

  Eigen::Index size() const { return c.size(); }
  int vars() const { return static_cast<int>(A.size()); }
  /// The monic system pencil I - sum_j A_j x_j.
  LinearPencil system_pencil() const;
};

/// Prefix-state realization of a polynomial; the A_j are jointly nilpotent by
/// construction and eval_realization reproduces eval_poly.
DescriptorRealization realize_poly(const NcPolynomial& f);

/// (c^* (x) I)(I - sum A_j (x) X_j)^{-1}(b (x) I); EvalError at singular points.
ComplexMatrix eval_realization(const DescriptorRealization& R, const MatrixTuple& X);

/// Size delta+1 realization of the inverse series; requires c^* b != 0.
DescriptorRealization invert_realization(const DescriptorRealization& R);

/// Controllability/observability compression by iterated span growth; the
/// output size equals the Hankel rank of the series.
DescriptorRealization minimize_realization(const DescriptorRealization& R,
                                           const ToleranceConfig& cfg);

/// Purely stable determinantal representation of a stable polynomial.
struct DetRep {
  LinearPencil L;
  PurelyStableData purely_stable;
  Eigen::VectorXd alpha;   // real shift used by the pipeline
  double scaling = 1.0;    // positive rescaling of the stage solution
  bool padded = false;
  double pad_phases[2] = {0.0, 0.0};
};

struct PolyStabilityResult {
  StabilityCertificate cert;
  std::optional<DetRep> rep;
};

/// Shift-normalize-realize-invert-minimize pipeline; the polynomial is stable
/// iff the resulting monic pencil shifted back is stable.
StabilityCertificate check_stable_poly(const NcPolynomial& f, const ToleranceConfig& cfg,
                                       std::uint64_t seed = 0);

/// Runs the stability pipeline and, for single-stage certificates, rescales
/// and phase-pads the stage solution into a purely stable pencil L with
/// det f(X) = det L(X) for all matrix tuples X.
PolyStabilityResult detrep(const NcPolynomial& f, const ToleranceConfig& cfg,
                           std::uint64_t seed = 0);

/// Sampled determinant comparison over generic and upper-orthant tuples of
/// the given sizes, plus the purely-stable check on L.
bool verify_detrep(const NcPolynomial& f, const LinearPencil& L,
                   const std::vector<int>& sizes, int samples, std::uint64_t seed,
                   const ToleranceConfig& cfg, double* max_residual = nullptr,
                   bool parallel = true);

/// Stable two-variable polynomial p(x_1) + q(x_1) x_2 from a partial-fraction
/// datum sum_k alpha_k / (t - beta_k) with alpha_k < 0 and distinct real beta_k.
NcPolynomial gen_stable_poly(const std::vector<double>& alphas,
                             const std::vector<double>& betas);

/// Hermitian shortcut: affine with uniformly signed coefficients -> Stable;
/// nonaffine with irreducible minimized pencil -> Unstable; otherwise nullopt
/// (defer to the full pipeline). Requires a hermitian f with f(0) = 1.
std::optional<Verdict> affine_hermitian_check(const NcPolynomial& f,
                                              const ToleranceConfig& cfg);

}  // namespace ncstable
