// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include <doctest.h>

#include <Eigen/Dense>

#include "ratebal/cmat.hpp"
#include "ratebal/rng.hpp"
#include "test_support.hpp"

using namespace ratebal;
using testing::random_matrix;
using testing::to_eigen;

namespace {

// naive reference multiply with explicit conjugation handling
CMat naive_gemm(Op opa, const CMat& a, Op opb, const CMat& b) {
  const int am = (opa == Op::none) ? a.rows() : a.cols();
  const int ak = (opa == Op::none) ? a.cols() : a.rows();
  const int bn = (opb == Op::none) ? b.cols() : b.rows();
  CMat c(am, bn);
  for (int i = 0; i < am; ++i)
    for (int j = 0; j < bn; ++j) {
      cxd s(0.0, 0.0);
      for (int l = 0; l < ak; ++l) {
        const cxd av = (opa == Op::none) ? a(i, l) : std::conj(a(l, i));
        const cxd bv = (opb == Op::none) ? b(l, j) : std::conj(b(j, l));
        s += av * bv;
      }
      c(i, j) = s;
    }
  return c;
}

}  // namespace

TEST_CASE("gemm matches the naive reference for all op combinations") {
  Rng rng(3);
  const CMat a = random_matrix(rng, 5, 4);
  const CMat b54 = random_matrix(rng, 5, 4);
  const CMat b45 = random_matrix(rng, 4, 5);

  struct Case {
    Op opa, opb;
    const CMat *x, *y;
  } cases[] = {
      {Op::none, Op::none, &a, &b45},
      {Op::adjoint, Op::none, &a, &b54},
      {Op::none, Op::adjoint, &a, &b54},
      {Op::adjoint, Op::adjoint, &a, &b45},
  };
  for (const Case& c : cases) {
    const CMat got = gemm(c.opa, *c.x, c.opb, *c.y);
    const CMat want = naive_gemm(c.opa, *c.x, c.opb, *c.y);
    CHECK(max_abs_diff(got, want) < 1e-13);
  }
  CHECK_THROWS_AS(gemm(Op::none, a, Op::none, b54), Error);
}

TEST_CASE("gram products are exactly Hermitian and correct") {
  Rng rng(5);
  const CMat a = random_matrix(rng, 4, 6);
  const CMat g1 = gram(a);      // a a^H
  const CMat g2 = gram_adj(a);  // a^H a
  CHECK(max_abs_diff(g1, naive_gemm(Op::none, a, Op::adjoint, a)) < 1e-13);
  CHECK(max_abs_diff(g2, naive_gemm(Op::adjoint, a, Op::none, a)) < 1e-13);
  for (int i = 0; i < g1.rows(); ++i)
    for (int j = 0; j < g1.cols(); ++j) {
      CHECK(g1(i, j) == std::conj(g1(j, i)));  // bitwise symmetry
      CHECK(g2(i, j) == std::conj(g2(j, i)));
    }
}

TEST_CASE("herm_rank1_update accumulates w x x^H") {
  Rng rng(9);
  std::vector<cxd> x(5);
  for (cxd& v : x) v = rng.complex_gaussian();
  CMat r(5, 5);
  herm_rank1_update(r, 0.7, x.data());
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const cxd want = 0.7 * x[size_t(i)] * std::conj(x[size_t(j)]);
      CHECK(std::abs(r(i, j) - want) < 1e-14);
    }
}

TEST_CASE("cholesky solves, log-det, and inverse") {
  Rng rng(13);
  const int n = 6;
  const CMat x = random_matrix(rng, n, n + 2);
  CMat a = gram(x);
  for (int i = 0; i < n; ++i) a(i, i) += 1.0;

  const CholeskyLLT chol(a);
  const CMat b = random_matrix(rng, n, 3);
  const CMat sol = chol.solve(b);
  CHECK(max_abs_diff(a * sol, b) < 1e-11);

  // log-det against an eigenvalue oracle
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
  double want = 0.0;
  for (int i = 0; i < n; ++i) want += std::log(es.eigenvalues()(i));
  CHECK(chol.log_det() == doctest::Approx(want).epsilon(1e-12));

  const CMat inv = chol.inverse();
  CHECK(max_abs_diff(a * inv, CMat::identity(n)) < 1e-11);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(inv(i, j) == std::conj(inv(j, i)));
}

TEST_CASE("cholesky rejects indefinite matrices") {
  CMat a = CMat::identity(2);
  a(1, 1) = -1.0;
  CHECK_THROWS_AS(CholeskyLLT{a}, Error);
  try {
    CholeskyLLT chol(a);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::singular_system);
  }
}

TEST_CASE("LU solver on random and singular systems") {
  Rng rng(17);
  const int n = 6;
  // plain random matrices force genuine pivoting
  for (int rep = 0; rep < 10; ++rep) {
    RMat a(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) a(i, j) = rng.gaussian();
    std::vector<double> b(static_cast<size_t>(n));
    for (double& v : b) v = rng.gaussian();

    const std::vector<double> x = LuSolver(a).solve(b);
    const std::vector<double> ax = matvec(a, x);
    for (int i = 0; i < n; ++i)
      CHECK(ax[size_t(i)] == doctest::Approx(b[size_t(i)]).epsilon(1e-9));
  }

  RMat s(2, 2);
  s(0, 0) = 1.0;
  s(0, 1) = 2.0;
  s(1, 0) = 2.0;
  s(1, 1) = 4.0;  // rank 1
  CHECK_THROWS_AS(LuSolver{s}, Error);
}

TEST_CASE("matvec matches a plain loop") {
  Rng rng(21);
  RMat a(3, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 3; ++i) a(i, j) = rng.gaussian();
  std::vector<double> x{0.5, -1.0, 2.0, 0.25};
  const std::vector<double> y = matvec(a, x);
  for (int i = 0; i < 3; ++i) {
    double want = 0.0;
    for (int j = 0; j < 4; ++j) want += a(i, j) * x[size_t(j)];
    CHECK(y[size_t(i)] == doctest::Approx(want).epsilon(1e-13));
  }
}
