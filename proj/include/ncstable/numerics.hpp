#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "ncstable/core.hpp"

namespace ncstable {

/// Numerical thresholds shared by all modules. Defaults are one order looser
/// per composition layer.
struct ToleranceConfig {
  double rank_tol = 1e-9;      // relative singular-value threshold
  double psd_tol = 1e-8;       // eigenvalue floor for definiteness tests
  double residual_tol = 1e-6;  // certificate verification residual
  double sdp_tol = 1e-8;       // solver stopping tolerance

  /// Reads NCSTABLE_TOL_RANK / _PSD / _RESIDUAL / _SDP when set.
  static ToleranceConfig from_env();
};

using Rng = std::mt19937_64;

/// Derives an independent stream from (seed, salt...) without sharing state.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng);

/// Orthonormal basis of { v : ||Mv|| <= rank_tol * sigma_max * ||v|| }.
/// Zero columns when the kernel is trivial; identity columns for M = 0.
ComplexMatrix kernel_basis(const ComplexMatrix& M, const ToleranceConfig& cfg);

/// Orthonormal basis of the intersection of the kernels (stacked SVD).
ComplexMatrix joint_kernel(std::span<const ComplexMatrix> Ms, const ToleranceConfig& cfg);
ComplexMatrix joint_kernel(const std::vector<ComplexMatrix>& Ms, const ToleranceConfig& cfg);

bool is_hermitian_mat(const ComplexMatrix& M, const ToleranceConfig& cfg);
/// Hermitian within psd_tol*(1+||M||) and lambda_min of the hermitian part
/// >= -psd_tol*(1+||M||).
bool is_psd(const ComplexMatrix& M, const ToleranceConfig& cfg);

/// Point of the matricial positive orthant: X_j = R_j + i(G_j G_j^* + 0.1 I).
MatrixTuple sample_upper_point(int d, Eigen::Index n, std::uint64_t seed);
/// Point of the noncommutative polydisk: each X_j with spectral norm < 1.
MatrixTuple sample_polydisk_point(int d, Eigen::Index n, std::uint64_t seed);

double min_singular_value(const ComplexMatrix& M);
double spectral_norm(const ComplexMatrix& M);

/// Orthonormal basis of the column space, relative threshold rank_tol.
ComplexMatrix column_space_basis(const ComplexMatrix& M, const ToleranceConfig& cfg);
/// Orthonormal basis of the orthogonal complement of ran(V), V with
/// orthonormal columns.
ComplexMatrix orthogonal_complement(const ComplexMatrix& V, Eigen::Index ambient);

/// || P_U - P_V || for the projectors onto the two column spans.
double span_distance(const ComplexMatrix& U, const ComplexMatrix& V);

}  // namespace ncstable
