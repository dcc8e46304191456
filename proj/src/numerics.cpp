#include "ncstable/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cstdlib>
#include <string>

namespace ncstable {

namespace {

double env_or(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || v < 0.0 || !std::isfinite(v)) return fallback;
  return v;
}

}  // namespace

ToleranceConfig ToleranceConfig::from_env() {
  ToleranceConfig cfg;
  cfg.rank_tol = env_or("NCSTABLE_TOL_RANK", cfg.rank_tol);
  cfg.psd_tol = env_or("NCSTABLE_TOL_PSD", cfg.psd_tol);
  cfg.residual_tol = env_or("NCSTABLE_TOL_RESIDUAL", cfg.residual_tol);
  cfg.sdp_tol = env_or("NCSTABLE_TOL_SDP", cfg.sdp_tol);
  return cfg;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 finalizer over the combined stream id.
  std::uint64_t x = seed;
  for (std::uint64_t salt : {a + 1, b + 2, c + 3}) {
    x += 0x9e3779b97f4a7c15ULL * salt;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
  }
  return x;
}

ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  ComplexMatrix g = random_gaussian(n, n, rng);
  return real_part(g);
}

ComplexMatrix kernel_basis(const ComplexMatrix& M, const ToleranceConfig& cfg) {
  if (M.size() == 0) return ComplexMatrix::Identity(M.cols(), M.cols());
  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  if (smax == 0.0) return ComplexMatrix::Identity(M.cols(), M.cols());
  const double thresh = cfg.rank_tol * smax;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > thresh) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

ComplexMatrix joint_kernel(std::span<const ComplexMatrix> Ms, const ToleranceConfig& cfg) {
  if (Ms.empty()) throw InputError("joint_kernel: empty list");
  const Eigen::Index cols = Ms.front().cols();
  Eigen::Index rows = 0;
  for (const auto& m : Ms) {
    if (m.cols() != cols) throw InputError("joint_kernel: column counts differ");
    rows += m.rows();
  }
  ComplexMatrix stacked(rows, cols);
  Eigen::Index at = 0;
  for (const auto& m : Ms) {
    stacked.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return kernel_basis(stacked, cfg);
}

ComplexMatrix joint_kernel(const std::vector<ComplexMatrix>& Ms, const ToleranceConfig& cfg) {
  return joint_kernel(std::span<const ComplexMatrix>(Ms.data(), Ms.size()), cfg);
}

bool is_hermitian_mat(const ComplexMatrix& M, const ToleranceConfig& cfg) {
  if (M.rows() != M.cols()) throw InputError("is_hermitian_mat: non-square matrix");
  return (M - M.adjoint()).norm() <= cfg.psd_tol * (1.0 + M.norm());
}

bool is_psd(const ComplexMatrix& M, const ToleranceConfig& cfg) {
  if (M.rows() != M.cols()) throw InputError("is_psd: non-square matrix");
  const double scale = cfg.psd_tol * (1.0 + M.norm());
  if ((M - M.adjoint()).norm() > scale) return false;
  if (M.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(real_part(M),
                                                   Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -scale;
}

MatrixTuple sample_upper_point(int d, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw InputError("sample_upper_point: n must be >= 1");
  constexpr double kFloor = 0.1;
  MatrixTuple out;
  out.X.reserve(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    Rng rng(mix_seed(seed, 0x75, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(j)));
    ComplexMatrix r = random_hermitian(n, rng);
    ComplexMatrix g = random_gaussian(n, n, rng);
    out.X.push_back(r + Complex(0, 1) * (g * g.adjoint() + kFloor * ComplexMatrix::Identity(n, n)));
  }
  return out;
}

MatrixTuple sample_polydisk_point(int d, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw InputError("sample_polydisk_point: n must be >= 1");
  MatrixTuple out;
  out.X.reserve(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    Rng rng(mix_seed(seed, 0xd1, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(j)));
    ComplexMatrix g = random_gaussian(n, n, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double rho = unit(rng);
    const double norm = spectral_norm(g);
    out.X.push_back(norm == 0.0 ? g : ComplexMatrix(g * (rho / norm)));
  }
  return out;
}

double min_singular_value(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  return svd.singularValues().minCoeff();
}

double spectral_norm(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  return svd.singularValues().maxCoeff();
}

ComplexMatrix column_space_basis(const ComplexMatrix& M, const ToleranceConfig& cfg) {
  if (M.size() == 0) return ComplexMatrix(M.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeFullU);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  if (smax == 0.0) return ComplexMatrix(M.rows(), 0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cfg.rank_tol * smax) ++rank;
  return svd.matrixU().leftCols(rank);
}

ComplexMatrix orthogonal_complement(const ComplexMatrix& V, Eigen::Index ambient) {
  if (V.rows() != 0 && V.rows() != ambient)
    throw InputError("orthogonal_complement: ambient dimension mismatch");
  if (V.cols() == 0) return ComplexMatrix::Identity(ambient, ambient);
  Eigen::JacobiSVD<ComplexMatrix> svd(V, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(ambient - V.cols());
}

double span_distance(const ComplexMatrix& U, const ComplexMatrix& V) {
  const ComplexMatrix pu = U.cols() == 0 ? ComplexMatrix::Zero(U.rows(), U.rows())
                                         : ComplexMatrix(U * U.adjoint());
  const ComplexMatrix pv = V.cols() == 0 ? ComplexMatrix::Zero(V.rows(), V.rows())
                                         : ComplexMatrix(V * V.adjoint());
  return (pu - pv).norm();
}

}  // namespace ncstable
