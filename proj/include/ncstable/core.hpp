#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "ncstable/errors.hpp"

namespace ncstable {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Kronecker product, left factor varies slowest.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Hermitian real part (M + M*)/2.
ComplexMatrix real_part(const ComplexMatrix& m);
/// Hermitian imaginary part (M - M*)/(2i).
ComplexMatrix imag_part(const ComplexMatrix& m);

/// Tuple (X_1, ..., X_d) of n x n matrices.
struct MatrixTuple {
  std::vector<ComplexMatrix> X;

  MatrixTuple() = default;
  explicit MatrixTuple(std::vector<ComplexMatrix> xs);

  int vars() const { return static_cast<int>(X.size()); }
  Eigen::Index size() const { return X.empty() ? 0 : X.front().rows(); }

  static MatrixTuple scalars(const std::vector<Complex>& values);

  /// Entrywise adjoint tuple (X_1^*, ..., X_d^*).
  MatrixTuple adjoint() const;
  /// Componentwise direct sum with another tuple of the same length.
  MatrixTuple direct_sum(const MatrixTuple& other) const;
};

/// Linear matrix pencil A_0 + A_1 x_1 + ... + A_d x_d with A_j of size rows x cols.
class LinearPencil {
 public:
  LinearPencil() = default;
  /// Zero pencil in d variables of the given shape.
  LinearPencil(int d, Eigen::Index rows, Eigen::Index cols);
  /// Builds from [A_0, ..., A_d]; validates uniform shapes.
  static LinearPencil from_coeffs(std::vector<ComplexMatrix> coeffs);

  int vars() const { return static_cast<int>(coeffs_.size()) - 1; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  const ComplexMatrix& coeff(int j) const { return coeffs_.at(static_cast<size_t>(j)); }
  ComplexMatrix& coeff(int j) { return coeffs_.at(static_cast<size_t>(j)); }
  const std::vector<ComplexMatrix>& coeffs() const { return coeffs_; }

  /// Largest coefficient Frobenius norm; scale reference for tolerances.
  double coeff_scale() const;

  LinearPencil operator*(double s) const;
  LinearPencil operator-() const { return *this * -1.0; }

 private:
  Eigen::Index rows_ = 0, cols_ = 0;
  std::vector<ComplexMatrix> coeffs_;
};

/// L(X) = A_0 (x) I + sum_j A_j (x) X_j, coefficient-first Kronecker order.
ComplexMatrix eval_pencil(const LinearPencil& L, const MatrixTuple& X);

/// Entrywise transpose (no conjugation) of every coefficient.
LinearPencil transpose_pencil(const LinearPencil& L);

/// L(x + alpha): constant term A_0 + sum_j alpha_j A_j, linear part unchanged.
LinearPencil shift_pencil(const LinearPencil& L, const Eigen::VectorXd& alpha);

/// True iff every coefficient is hermitian within tol (square pencils only).
bool is_hermitian_pencil(const LinearPencil& L, double tol);

/// D * L, coefficientwise left multiplication.
LinearPencil mul_left(const ComplexMatrix& D, const LinearPencil& L);
/// L * E, coefficientwise right multiplication.
LinearPencil mul_right(const LinearPencil& L, const ComplexMatrix& E);
/// Block-diagonal direct sum of pencils over the same variables.
LinearPencil direct_sum(const LinearPencil& a, const LinearPencil& b);
/// Sub-pencil of rows [r0, r0+nr) x cols [c0, c0+nc) of every coefficient.
LinearPencil block(const LinearPencil& L, Eigen::Index r0, Eigen::Index c0,
                   Eigen::Index nr, Eigen::Index nc);

/// Monomial in the free algebra: letters are variable indices in 1..d, empty = 1.
using Word = std::vector<int>;

/// Graded-lexicographic order: by length, then lexicographic.
struct WordOrder {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// Noncommutative polynomial as a word -> coefficient map over C<x_1..x_d>.
/// Coefficients with modulus <= kZeroTol are dropped on construction.
class NcPolynomial {
 public:
  static constexpr double kZeroTol = 1e-14;
  using TermMap = std::map<Word, Complex, WordOrder>;

  explicit NcPolynomial(int d = 0);
  static NcPolynomial constant(int d, Complex c);
  static NcPolynomial variable(int d, int j);
  static NcPolynomial monomial(int d, Word w, Complex c);

  int vars() const { return d_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // -1 for the zero polynomial
  Complex coeff(const Word& w) const;

  /// Adds c * w to the polynomial (accumulates, drops tiny results).
  void add_term(const Word& w, Complex c);

  NcPolynomial operator+(const NcPolynomial& g) const;
  NcPolynomial operator-(const NcPolynomial& g) const;
  NcPolynomial operator*(const NcPolynomial& g) const;
  NcPolynomial operator*(Complex s) const;

  /// f(x + alpha), expanded over the free algebra.
  NcPolynomial shift(const Eigen::VectorXd& alpha) const;

  /// Commutative collapse: multidegree -> summed coefficient (exact arithmetic
  /// on the stored coefficients; no sampling).
  std::map<std::vector<int>, Complex> commutative_collapse() const;
  /// Value of the commutative collapse at a real point.
  Complex scalar_eval(const Eigen::VectorXd& alpha) const;

  bool operator==(const NcPolynomial& g) const;

 private:
  int d_ = 0;
  TermMap terms_;
};

/// Free-algebra evaluation: word x_{j1}...x_{jk} -> X_{j1}...X_{jk}, constants to c*I.
ComplexMatrix eval_poly(const NcPolynomial& f, const MatrixTuple& X);

/// True iff coeff(reverse(w)) = conj(coeff(w)) for every word.
bool is_hermitian_poly(const NcPolynomial& f);

}  // namespace ncstable
