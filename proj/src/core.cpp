#include "ncstable/core.hpp"

#include <algorithm>
#include <sstream>

namespace ncstable {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix real_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix imag_part(const ComplexMatrix& m) {
  return (m - m.adjoint()) / Complex(0.0, 2.0);
}

MatrixTuple::MatrixTuple(std::vector<ComplexMatrix> xs) : X(std::move(xs)) {
  for (const auto& x : X) {
    if (x.rows() != x.cols() || (!X.empty() && x.rows() != X.front().rows()))
      throw InputError("matrix tuple entries must be square and share one size");
  }
}

MatrixTuple MatrixTuple::scalars(const std::vector<Complex>& values) {
  std::vector<ComplexMatrix> xs;
  xs.reserve(values.size());
  for (Complex v : values) xs.push_back(ComplexMatrix::Constant(1, 1, v));
  return MatrixTuple(std::move(xs));
}

MatrixTuple MatrixTuple::adjoint() const {
  MatrixTuple out;
  out.X.reserve(X.size());
  for (const auto& x : X) out.X.push_back(x.adjoint());
  return out;
}

MatrixTuple MatrixTuple::direct_sum(const MatrixTuple& other) const {
  if (vars() != other.vars()) throw InputError("direct_sum: variable count mismatch");
  MatrixTuple out;
  out.X.reserve(X.size());
  for (size_t j = 0; j < X.size(); ++j) {
    ComplexMatrix s = ComplexMatrix::Zero(X[j].rows() + other.X[j].rows(),
                                          X[j].cols() + other.X[j].cols());
    s.topLeftCorner(X[j].rows(), X[j].cols()) = X[j];
    s.bottomRightCorner(other.X[j].rows(), other.X[j].cols()) = other.X[j];
    out.X.push_back(std::move(s));
  }
  return out;
}

LinearPencil::LinearPencil(int d, Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols) {
  if (d < 0 || rows <= 0 || cols <= 0) throw InputError("pencil: bad shape");
  coeffs_.assign(static_cast<size_t>(d) + 1, ComplexMatrix::Zero(rows, cols));
}

LinearPencil LinearPencil::from_coeffs(std::vector<ComplexMatrix> coeffs) {
  if (coeffs.empty()) throw InputError("pencil: needs at least a constant term");
  LinearPencil L;
  L.rows_ = coeffs.front().rows();
  L.cols_ = coeffs.front().cols();
  if (L.rows_ <= 0 || L.cols_ <= 0) throw InputError("pencil: empty coefficient");
  for (const auto& a : coeffs)
    if (a.rows() != L.rows_ || a.cols() != L.cols_)
      throw InputError("pencil: coefficient shapes differ");
  L.coeffs_ = std::move(coeffs);
  return L;
}

double LinearPencil::coeff_scale() const {
  double s = 0.0;
  for (const auto& a : coeffs_) s = std::max(s, a.norm());
  return s;
}

LinearPencil LinearPencil::operator*(double s) const {
  LinearPencil out = *this;
  for (auto& a : out.coeffs_) a *= s;
  return out;
}

ComplexMatrix eval_pencil(const LinearPencil& L, const MatrixTuple& X) {
  if (L.vars() != X.vars())
    throw InputError("eval_pencil: pencil has " + std::to_string(L.vars()) +
                     " variables, tuple has " + std::to_string(X.vars()));
  const Eigen::Index n = X.vars() == 0 ? 1 : X.size();
  if (n <= 0) throw InputError("eval_pencil: empty tuple");
  ComplexMatrix out = kron(L.coeff(0), ComplexMatrix::Identity(n, n));
  for (int j = 1; j <= L.vars(); ++j) out += kron(L.coeff(j), X.X[static_cast<size_t>(j - 1)]);
  return out;
}

LinearPencil transpose_pencil(const LinearPencil& L) {
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(L.coeffs().size());
  for (const auto& a : L.coeffs()) coeffs.push_back(a.transpose());
  return LinearPencil::from_coeffs(std::move(coeffs));
}

LinearPencil shift_pencil(const LinearPencil& L, const Eigen::VectorXd& alpha) {
  if (alpha.size() != L.vars()) throw InputError("shift_pencil: alpha length mismatch");
  LinearPencil out = L;
  for (int j = 1; j <= L.vars(); ++j) out.coeff(0) += alpha(j - 1) * L.coeff(j);
  return out;
}

bool is_hermitian_pencil(const LinearPencil& L, double tol) {
  if (!L.square()) throw InputError("is_hermitian_pencil: pencil must be square");
  for (const auto& a : L.coeffs())
    if ((a - a.adjoint()).norm() > tol) return false;
  return true;
}

LinearPencil mul_left(const ComplexMatrix& D, const LinearPencil& L) {
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(L.coeffs().size());
  for (const auto& a : L.coeffs()) coeffs.push_back(D * a);
  return LinearPencil::from_coeffs(std::move(coeffs));
}

LinearPencil mul_right(const LinearPencil& L, const ComplexMatrix& E) {
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(L.coeffs().size());
  for (const auto& a : L.coeffs()) coeffs.push_back(a * E);
  return LinearPencil::from_coeffs(std::move(coeffs));
}

LinearPencil direct_sum(const LinearPencil& a, const LinearPencil& b) {
  if (a.vars() != b.vars()) throw InputError("direct_sum: variable count mismatch");
  std::vector<ComplexMatrix> coeffs;
  for (int j = 0; j <= a.vars(); ++j) {
    ComplexMatrix s = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    s.topLeftCorner(a.rows(), a.cols()) = a.coeff(j);
    s.bottomRightCorner(b.rows(), b.cols()) = b.coeff(j);
    coeffs.push_back(std::move(s));
  }
  return LinearPencil::from_coeffs(std::move(coeffs));
}

LinearPencil block(const LinearPencil& L, Eigen::Index r0, Eigen::Index c0,
                   Eigen::Index nr, Eigen::Index nc) {
  std::vector<ComplexMatrix> coeffs;
  for (const auto& a : L.coeffs()) coeffs.push_back(a.block(r0, c0, nr, nc));
  return LinearPencil::from_coeffs(std::move(coeffs));
}

NcPolynomial::NcPolynomial(int d) : d_(d) {
  if (d < 0) throw InputError("polynomial: negative variable count");
}

NcPolynomial NcPolynomial::constant(int d, Complex c) {
  NcPolynomial f(d);
  f.add_term({}, c);
  return f;
}

NcPolynomial NcPolynomial::variable(int d, int j) {
  NcPolynomial f(d);
  f.add_term({j}, 1.0);
  return f;
}

NcPolynomial NcPolynomial::monomial(int d, Word w, Complex c) {
  NcPolynomial f(d);
  f.add_term(w, c);
  return f;
}

int NcPolynomial::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(terms_.rbegin()->first.size());
}

Complex NcPolynomial::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void NcPolynomial::add_term(const Word& w, Complex c) {
  for (int letter : w)
    if (letter < 1 || letter > d_)
      throw InputError("polynomial: letter " + std::to_string(letter) + " out of range 1.." +
                       std::to_string(d_));
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) <= kZeroTol) terms_.erase(it);
}

NcPolynomial NcPolynomial::operator+(const NcPolynomial& g) const {
  if (d_ != g.d_) throw InputError("polynomial add: variable count mismatch");
  NcPolynomial out = *this;
  for (const auto& [w, c] : g.terms_) out.add_term(w, c);
  return out;
}

NcPolynomial NcPolynomial::operator-(const NcPolynomial& g) const { return *this + g * Complex(-1.0); }

NcPolynomial NcPolynomial::operator*(const NcPolynomial& g) const {
  if (d_ != g.d_) throw InputError("polynomial mul: variable count mismatch");
  NcPolynomial out(d_);
  for (const auto& [u, cu] : terms_)
    for (const auto& [v, cv] : g.terms_) {
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      out.add_term(w, cu * cv);
    }
  return out;
}

NcPolynomial NcPolynomial::operator*(Complex s) const {
  NcPolynomial out(d_);
  for (const auto& [w, c] : terms_) out.add_term(w, c * s);
  return out;
}

NcPolynomial NcPolynomial::shift(const Eigen::VectorXd& alpha) const {
  if (alpha.size() != d_) throw InputError("shift: alpha length mismatch");
  NcPolynomial out(d_);
  // Expand each word over subsets of positions replaced by their alpha value.
  for (const auto& [w, c] : terms_) {
    const size_t k = w.size();
    std::vector<std::pair<Word, Complex>> partial{{Word{}, c}};
    for (size_t pos = 0; pos < k; ++pos) {
      std::vector<std::pair<Word, Complex>> next;
      next.reserve(partial.size() * 2);
      for (auto& [word, coeff] : partial) {
        Word with = word;
        with.push_back(w[pos]);
        next.emplace_back(std::move(with), coeff);
        next.emplace_back(word, coeff * alpha(w[pos] - 1));
      }
      partial = std::move(next);
    }
    for (auto& [word, coeff] : partial) out.add_term(word, coeff);
  }
  return out;
}

std::map<std::vector<int>, Complex> NcPolynomial::commutative_collapse() const {
  std::map<std::vector<int>, Complex> collapsed;
  for (const auto& [w, c] : terms_) {
    std::vector<int> deg(static_cast<size_t>(d_), 0);
    for (int letter : w) deg[static_cast<size_t>(letter - 1)] += 1;
    collapsed[deg] += c;
  }
  for (auto it = collapsed.begin(); it != collapsed.end();) {
    if (std::abs(it->second) <= kZeroTol)
      it = collapsed.erase(it);
    else
      ++it;
  }
  return collapsed;
}

Complex NcPolynomial::scalar_eval(const Eigen::VectorXd& alpha) const {
  if (alpha.size() != d_) throw InputError("scalar_eval: alpha length mismatch");
  Complex value = 0.0;
  for (const auto& [w, c] : terms_) {
    Complex m = c;
    for (int letter : w) m *= alpha(letter - 1);
    value += m;
  }
  return value;
}

bool NcPolynomial::operator==(const NcPolynomial& g) const {
  return d_ == g.d_ && terms_ == g.terms_;
}

ComplexMatrix eval_poly(const NcPolynomial& f, const MatrixTuple& X) {
  if (f.vars() != X.vars())
    throw InputError("eval_poly: polynomial has " + std::to_string(f.vars()) +
                     " variables, tuple has " + std::to_string(X.vars()));
  const Eigen::Index n = X.vars() == 0 ? 1 : X.size();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& [w, c] : f.terms()) {
    ComplexMatrix m = ComplexMatrix::Identity(n, n);
    for (int letter : w) m = m * X.X[static_cast<size_t>(letter - 1)];
    out += c * m;
  }
  return out;
}

bool is_hermitian_poly(const NcPolynomial& f) {
  double scale = 0.0;
  for (const auto& [w, c] : f.terms()) scale = std::max(scale, std::abs(c));
  const double tol = 1e-12 * (1.0 + scale);
  for (const auto& [w, c] : f.terms()) {
    Word rev(w.rbegin(), w.rend());
    if (std::abs(f.coeff(rev) - std::conj(c)) > tol) return false;
  }
  return true;
}

}  // namespace ncstable
