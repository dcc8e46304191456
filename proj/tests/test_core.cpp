#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_helpers.hpp"

using namespace ncstable;
using namespace ncstable::testing;

TEST_CASE("eval_pencil substitution and constants") {
  // L = x_1
  LinearPencil L(1, 1, 1);
  L.coeff(1)(0, 0) = 1.0;
  MatrixTuple X;
  X.X.push_back(mat2(0, 1, 0, 0));
  CHECK(approx_eq(eval_pencil(L, X), mat2(0, 1, 0, 0)));

  // constant pencil I_2 at any X gives I_{2n}
  LinearPencil C(1, 2, 2);
  C.coeff(0) = ComplexMatrix::Identity(2, 2);
  CHECK(approx_eq(eval_pencil(C, X), ComplexMatrix::Identity(4, 4)));

  // paper 2x2 pencil at the scalar 3
  LinearPencil P(1, 2, 2);
  P.coeff(0) = mat2(1, 0, 0, -1);
  P.coeff(1) = mat2(2, -1, -1, 0);
  CHECK(approx_eq(eval_pencil(P, MatrixTuple::scalars({3.0})), mat2(7, -3, -3, -1)));

  LinearPencil bad(2, 1, 1);
  CHECK_THROWS_AS(eval_pencil(bad, X), InputError);
}

TEST_CASE("eval_poly homomorphism examples") {
  NcPolynomial f = NcPolynomial::constant(2, 1.0) -
                   NcPolynomial::variable(2, 1) * NcPolynomial::variable(2, 2);
  MatrixTuple I2;
  I2.X = {ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)};
  CHECK(approx_eq(eval_poly(f, I2), ComplexMatrix::Zero(2, 2)));

  NcPolynomial comm = NcPolynomial::variable(2, 1) * NcPolynomial::variable(2, 2) -
                      NcPolynomial::variable(2, 2) * NcPolynomial::variable(2, 1);
  CHECK(approx_eq(eval_poly(comm, MatrixTuple::scalars({1.7, -0.3})),
                  ComplexMatrix::Zero(1, 1)));

  // hand multiplication with nilpotent shifts
  MatrixTuple N;
  N.X = {mat2(0, 1, 0, 0), mat2(0, 0, 1, 0)};
  CHECK(approx_eq(eval_poly(f, N), mat2(0, 0, 0, 1)));
}

TEST_CASE("eval_poly is multiplicative on random products") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    NcPolynomial f = random_sparse_poly(2, 3, 4, rng);
    NcPolynomial g = random_sparse_poly(2, 3, 4, rng);
    MatrixTuple X = random_tuple(2, 2, rng);
    const ComplexMatrix lhs = eval_poly(f * g, X);
    const ComplexMatrix rhs = eval_poly(f, X) * eval_poly(g, X);
    CHECK((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("transpose_pencil") {
  Rng rng(5);
  LinearPencil sym(1, 2, 2);
  sym.coeff(0) = mat2(1, 2, 2, 5);
  sym.coeff(1) = mat2(0, 3, 3, 1);
  const LinearPencil symT = transpose_pencil(sym);
  for (int j = 0; j <= 1; ++j) CHECK(approx_eq(symT.coeff(j), sym.coeff(j)));

  LinearPencil e(1, 2, 2);
  e.coeff(1) = mat2(0, 1, 0, 0);
  CHECK(approx_eq(transpose_pencil(e).coeff(1), mat2(0, 0, 1, 0)));

  const LinearPencil R = random_pencil(2, 3, 2, rng);
  const LinearPencil RTT = transpose_pencil(transpose_pencil(R));
  for (int j = 0; j <= 2; ++j) CHECK(approx_eq(RTT.coeff(j), R.coeff(j)));
}

TEST_CASE("shift_pencil group action and consistency") {
  Rng rng(7);
  const LinearPencil L = random_pencil(2, 2, 3, rng);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const LinearPencil Lz = shift_pencil(L, zero);
  for (int j = 0; j <= 2; ++j) CHECK(approx_eq(Lz.coeff(j), L.coeff(j)));

  LinearPencil X1(1, 1, 1);
  X1.coeff(1)(0, 0) = 1.0;
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(approx_eq(shift_pencil(X1, one).coeff(0), scalar_mat(1.0)));

  Eigen::VectorXd alpha(2);
  alpha << 0.3, -1.2;
  const LinearPencil back = shift_pencil(shift_pencil(L, alpha), -alpha);
  for (int j = 0; j <= 2; ++j) CHECK(approx_eq(back.coeff(j), L.coeff(j)));

  // eval_pencil(shift(L, a), X) = eval_pencil(L, X + a I)
  MatrixTuple X = random_tuple(2, 2, rng);
  MatrixTuple shifted = X;
  for (int j = 0; j < 2; ++j)
    shifted.X[static_cast<size_t>(j)] += alpha(j) * ComplexMatrix::Identity(2, 2);
  CHECK(approx_eq(eval_pencil(shift_pencil(L, alpha), X), eval_pencil(L, shifted), 1e-9));
}

TEST_CASE("is_hermitian_pencil") {
  LinearPencil sym(1, 2, 2);
  sym.coeff(0) = mat2(1, 2, 2, -1);
  sym.coeff(1) = mat2(0, 3, 3, 1);
  CHECK(is_hermitian_pencil(sym, 1e-10));

  LinearPencil e(1, 2, 2);
  e.coeff(1) = mat2(0, 1, 0, 0);
  CHECK_FALSE(is_hermitian_pencil(e, 1e-10));

  LinearPencil paper(1, 2, 2);
  paper.coeff(0) = mat2(1, 0, 0, -1);
  paper.coeff(1) = mat2(2, -1, -1, 0);
  CHECK(is_hermitian_pencil(paper, 1e-10));

  LinearPencil rect(1, 2, 3);
  CHECK_THROWS_AS(is_hermitian_pencil(rect, 1e-10), InputError);
}

TEST_CASE("is_hermitian_poly") {
  NcPolynomial f(2);
  f.add_term({}, 1.0);
  f.add_term({1, 2}, 1.0);
  f.add_term({2, 1}, 1.0);
  CHECK(is_hermitian_poly(f));

  NcPolynomial g(2);
  g.add_term({1, 2}, 1.0);
  CHECK_FALSE(is_hermitian_poly(g));

  NcPolynomial affine(3);
  affine.add_term({}, 1.0);
  for (int j = 1; j <= 3; ++j) affine.add_term({j}, -0.5 * j);
  CHECK(is_hermitian_poly(affine));

  // hermitian => eval respects adjoints
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixTuple X = random_tuple(2, 3, rng);
    const ComplexMatrix a = eval_poly(f, X.adjoint());
    const ComplexMatrix b = eval_poly(f, X).adjoint();
    CHECK((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
  }
}

TEST_CASE("direct sum evaluation is a fixed Kronecker shuffle") {
  Rng rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 2;
    const Eigen::Index rows = 2, cols = 3, n = 2, m = 3;
    const LinearPencil L = random_pencil(d, rows, cols, rng);
    const MatrixTuple X = random_tuple(d, n, rng);
    const MatrixTuple Y = random_tuple(d, m, rng);

    const ComplexMatrix whole = eval_pencil(L, X.direct_sum(Y));
    const ComplexMatrix x = eval_pencil(L, X);
    const ComplexMatrix y = eval_pencil(L, Y);
    ComplexMatrix blocks = ComplexMatrix::Zero(x.rows() + y.rows(), x.cols() + y.cols());
    blocks.topLeftCorner(x.rows(), x.cols()) = x;
    blocks.bottomRightCorner(y.rows(), y.cols()) = y;

    // canonical shuffle depends only on the shapes
    auto shuffle = [&](Eigen::Index outer, Eigen::Index first) {
      ComplexMatrix P = ComplexMatrix::Zero(outer * (n + m), outer * (n + m));
      for (Eigen::Index a = 0; a < outer; ++a)
        for (Eigen::Index s = 0; s < n + m; ++s) {
          const Eigen::Index from = a * (n + m) + s;
          const Eigen::Index to = s < n ? a * n + s : outer * n + a * m + (s - n);
          P(from, to) = 1.0;
          (void)first;
        }
      return P;
    };
    const ComplexMatrix Pr = shuffle(rows, n);
    const ComplexMatrix Pc = shuffle(cols, n);
    CHECK(approx_eq(whole, Pr * blocks * Pc.transpose(), 1e-9));
  }
}

TEST_CASE("polynomial construction canonicalizes") {
  NcPolynomial f(2);
  f.add_term({1, 2}, 1.0);
  f.add_term({1, 2}, -1.0);
  CHECK(f.is_zero());
  f.add_term({}, 1e-16);
  CHECK(f.is_zero());
  CHECK_THROWS_AS(f.add_term({3}, 1.0), InputError);

  NcPolynomial g(2);
  g.add_term({2, 1, 1}, 2.0);
  CHECK(g.degree() == 3);
  const auto collapse = g.commutative_collapse();
  CHECK(collapse.size() == 1);
  CHECK(collapse.begin()->first == std::vector<int>{2, 1});
}

TEST_CASE("polynomial shift expands correctly") {
  // (x_1 + 1)(x_2 + 2) expansion through shift of x_1 x_2
  NcPolynomial f(2);
  f.add_term({1, 2}, 1.0);
  Eigen::VectorXd alpha(2);
  alpha << 1.0, 2.0;
  const NcPolynomial shifted = f.shift(alpha);
  CHECK(std::abs(shifted.coeff({1, 2}) - Complex(1.0)) < 1e-14);
  CHECK(std::abs(shifted.coeff({1}) - Complex(2.0)) < 1e-14);
  CHECK(std::abs(shifted.coeff({2}) - Complex(1.0)) < 1e-14);
  CHECK(std::abs(shifted.coeff({}) - Complex(2.0)) < 1e-14);

  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const NcPolynomial h = random_sparse_poly(2, 3, 5, rng);
    MatrixTuple X = random_tuple(2, 2, rng);
    MatrixTuple moved = X;
    for (int j = 0; j < 2; ++j)
      moved.X[static_cast<size_t>(j)] += alpha(j) * ComplexMatrix::Identity(2, 2);
    CHECK(approx_eq(eval_poly(h.shift(alpha), X), eval_poly(h, moved), 1e-8));
  }
}
