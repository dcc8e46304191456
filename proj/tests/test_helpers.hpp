#pragma once

#include <doctest.h>

#include <vector>

#include "ncstable/core.hpp"
#include "ncstable/numerics.hpp"

namespace ncstable::testing {

inline ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline ComplexMatrix scalar_mat(Complex z) { return ComplexMatrix::Constant(1, 1, z); }

inline bool approx_eq(const ComplexMatrix& a, const ComplexMatrix& b, double tol = 1e-10) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).norm() <= tol;
}

inline LinearPencil random_pencil(int d, Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::vector<ComplexMatrix> coeffs;
  for (int j = 0; j <= d; ++j) coeffs.push_back(random_gaussian(rows, cols, rng));
  return LinearPencil::from_coeffs(std::move(coeffs));
}

inline MatrixTuple random_tuple(int d, Eigen::Index n, Rng& rng) {
  MatrixTuple X;
  for (int j = 0; j < d; ++j) X.X.push_back(random_gaussian(n, n, rng));
  return X;
}

inline NcPolynomial random_sparse_poly(int d, int max_degree, int terms, Rng& rng) {
  NcPolynomial f(d);
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> letter(1, d);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < terms; ++t) {
    Word w;
    const int k = deg(rng);
    for (int i = 0; i < k; ++i) w.push_back(letter(rng));
    f.add_term(w, Complex(gauss(rng), gauss(rng)));
  }
  return f;
}

/// Random purely stable pencil H + iP_0 + sum P_j x_j with enforced trivial
/// joint kernel; occasionally leaves some P_j rank deficient.
inline LinearPencil random_purely_stable(int d, Eigen::Index delta, Rng& rng) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    LinearPencil L(d, delta, delta);
    std::uniform_int_distribution<Eigen::Index> rank(1, delta);
    std::bernoulli_distribution ridge(0.5);
    const ComplexMatrix H = random_hermitian(delta, rng);
    ComplexMatrix g = random_gaussian(delta, rank(rng), rng);
    L.coeff(0) = H + Complex(0, 1) * (g * g.adjoint() +
                                      (ridge(rng) ? 0.05 : 0.0) *
                                          ComplexMatrix::Identity(delta, delta));
    for (int j = 1; j <= d; ++j) {
      g = random_gaussian(delta, rank(rng), rng);
      L.coeff(j) = g * g.adjoint() + (ridge(rng) ? 0.05 : 0.0) *
                                         ComplexMatrix::Identity(delta, delta);
    }
    std::vector<ComplexMatrix> stack{real_part(L.coeff(0)), imag_part(L.coeff(0))};
    for (int j = 1; j <= d; ++j) stack.push_back(L.coeff(j));
    ToleranceConfig cfg;
    if (joint_kernel(stack, cfg).cols() == 0) return L;
  }
  throw std::runtime_error("random_purely_stable: generation failed");
}

/// Pencil with a planted scalar zero in the upper half-plane: invertible
/// P, Q mixing (x_1 - i) (+) purely stable junk.
inline LinearPencil planted_unstable(int d, Eigen::Index delta, Rng& rng) {
  LinearPencil core(d, delta, delta);
  core.coeff(0)(0, 0) = Complex(0, -1);
  core.coeff(1)(0, 0) = 1.0;
  if (delta > 1) {
    const LinearPencil junk = random_purely_stable(d, delta - 1, rng);
    for (int j = 0; j <= d; ++j)
      core.coeff(j).bottomRightCorner(delta - 1, delta - 1) = junk.coeff(j);
  }
  ComplexMatrix P, Q;
  do {
    P = random_gaussian(delta, delta, rng);
  } while (min_singular_value(P) < 0.1);
  do {
    Q = random_gaussian(delta, delta, rng);
  } while (min_singular_value(Q) < 0.1);
  return mul_right(mul_left(P, core), Q);
}

}  // namespace ncstable::testing
