// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/cmat.hpp"

#include <algorithm>
#include <cmath>

#include "ratebal/simd/kernels.hpp"

namespace ratebal {

namespace {

void require(bool ok, const char* what) {
  if (!ok) fail(Errc::spec_error, what);
}

}  // namespace

CMat CMat::identity(int n) {
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void CMat::set_zero() { std::fill(a_.begin(), a_.end(), cxd(0.0, 0.0)); }

RMat RMat::identity(int n) {
  RMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat gemm(Op opa, const CMat& a, Op opb, const CMat& b) {
  const int am = (opa == Op::none) ? a.rows() : a.cols();
  const int ak = (opa == Op::none) ? a.cols() : a.rows();
  const int bk = (opb == Op::none) ? b.rows() : b.cols();
  const int bn = (opb == Op::none) ? b.cols() : b.rows();
  require(ak == bk, "gemm: inner dimensions mismatch");
  CMat c(am, bn);

  if (opa == Op::none && opb == Op::none) {
    // c(:,j) += b(l,j) * a(:,l)
    for (int j = 0; j < bn; ++j) {
      cxd* cj = c.col(j);
      for (int l = 0; l < ak; ++l) {
        const cxd blj = b(l, j);
        if (blj != cxd(0.0, 0.0)) simd::zaxpy(size_t(am), blj, a.col(l), cj);
      }
    }
  } else if (opa == Op::adjoint && opb == Op::none) {
    // c(i,j) = conj(a(:,i)) . b(:,j)
    for (int j = 0; j < bn; ++j) {
      const cxd* bj = b.col(j);
      for (int i = 0; i < am; ++i)
        c(i, j) = simd::zdotc(size_t(ak), a.col(i), bj);
    }
  } else if (opa == Op::none && opb == Op::adjoint) {
    // c(:,j) += conj(b(j,l)) * a(:,l)
    for (int j = 0; j < bn; ++j) {
      cxd* cj = c.col(j);
      for (int l = 0; l < ak; ++l)
        simd::zaxpy(size_t(am), std::conj(b(j, l)), a.col(l), cj);
    }
  } else {
    // c(i,j) = sum_l conj(a(l,i)) * conj(b(j,l)) = conj(sum_l b(j,l) a(l,i))
    for (int j = 0; j < bn; ++j)
      for (int i = 0; i < am; ++i) {
        cxd s(0.0, 0.0);
        for (int l = 0; l < ak; ++l) s += b(j, l) * a(l, i);
        c(i, j) = std::conj(s);
      }
  }
  return c;
}

CMat adjoint(const CMat& a) {
  CMat r(a.cols(), a.rows());
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i) r(j, i) = std::conj(a(i, j));
  return r;
}

CMat operator+(const CMat& a, const CMat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  CMat r(a.rows(), a.cols());
  const size_t n = size_t(a.rows()) * a.cols();
  for (size_t i = 0; i < n; ++i) r.data()[i] = a.data()[i] + b.data()[i];
  return r;
}

CMat operator-(const CMat& a, const CMat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub: shape mismatch");
  CMat r(a.rows(), a.cols());
  const size_t n = size_t(a.rows()) * a.cols();
  for (size_t i = 0; i < n; ++i) r.data()[i] = a.data()[i] - b.data()[i];
  return r;
}

void herm_rank1_update(CMat& r, double w, const cxd* x) {
  const int n = r.rows();
  for (int j = 0; j < n; ++j) {
    const cxd xjc = std::conj(x[j]) * w;
    cxd* rj = r.col(j);
    // diagonal stays exactly real: x_j * conj(x_j) has zero imaginary part
    for (int i = j; i < n; ++i) {
      const cxd v = x[i] * xjc;
      rj[i] += v;
      if (i != j) r(j, i) += std::conj(v);
    }
  }
}

CMat gram(const CMat& a) {
  CMat r(a.rows(), a.rows());
  for (int l = 0; l < a.cols(); ++l) herm_rank1_update(r, 1.0, a.col(l));
  return r;
}

CMat gram_adj(const CMat& a) {
  const int n = a.cols();
  CMat r(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const cxd v = simd::zdotc(size_t(a.rows()), a.col(i), a.col(j));
      r(i, j) = (i == j) ? cxd(v.real(), 0.0) : v;
      if (i != j) r(j, i) = std::conj(v);
    }
  }
  return r;
}

void scale_col(CMat& a, int j, double s) {
  cxd* c = a.col(j);
  for (int i = 0; i < a.rows(); ++i) c[i] *= s;
}

double norm_fro(const CMat& a) {
  double s = 0.0;
  const size_t n = size_t(a.rows()) * a.cols();
  for (size_t i = 0; i < n; ++i) s += std::norm(a.data()[i]);
  return std::sqrt(s);
}

double max_abs_diff(const CMat& a, const CMat& b) {
  double m = 0.0;
  const size_t n = size_t(a.rows()) * a.cols();
  for (size_t i = 0; i < n; ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

std::vector<double> matvec(const RMat& a, const std::vector<double>& x) {
  require(int(x.size()) == a.cols(), "matvec: shape mismatch");
  std::vector<double> y(size_t(a.rows()), 0.0);
  for (int j = 0; j < a.cols(); ++j)
    simd::daxpy(size_t(a.rows()), x[size_t(j)], a.col(j), y.data());
  return y;
}

CholeskyLLT::CholeskyLLT(const CMat& a) : l_(a.rows(), a.cols()) {
  require(a.rows() == a.cols(), "cholesky: matrix not square");
  const int n = a.rows();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(l_(j, k));
    if (!(d > 0.0) || !std::isfinite(d))
      fail(Errc::singular_system, "cholesky: matrix not positive definite");
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      cxd s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l_(i, k) * std::conj(l_(j, k));
      l_(i, j) = s / ljj;
    }
  }
}

void CholeskyLLT::solve_in_place(CMat& b) const {
  const int n = l_.rows();
  require(b.rows() == n, "cholesky solve: shape mismatch");
  for (int c = 0; c < b.cols(); ++c) {
    cxd* x = b.col(c);
    for (int i = 0; i < n; ++i) {
      cxd s = x[i];
      for (int k = 0; k < i; ++k) s -= l_(i, k) * x[k];
      x[i] = s / l_(i, i).real();
    }
    for (int i = n - 1; i >= 0; --i) {
      cxd s = x[i];
      for (int k = i + 1; k < n; ++k) s -= std::conj(l_(k, i)) * x[k];
      x[i] = s / l_(i, i).real();
    }
  }
}

CMat CholeskyLLT::solve(const CMat& b) const {
  CMat x = b;
  solve_in_place(x);
  return x;
}

std::vector<cxd> CholeskyLLT::solve(const std::vector<cxd>& b) const {
  CMat tmp(int(b.size()), 1);
  std::copy(b.begin(), b.end(), tmp.data());
  solve_in_place(tmp);
  return {tmp.data(), tmp.data() + b.size()};
}

double CholeskyLLT::log_det() const {
  double s = 0.0;
  for (int j = 0; j < l_.rows(); ++j) s += std::log(l_(j, j).real());
  return 2.0 * s;
}

CMat CholeskyLLT::inverse() const {
  const int n = l_.rows();
  CMat inv = CMat::identity(n);
  solve_in_place(inv);
  // inverse of a Hermitian matrix is Hermitian; clean up solver roundoff
  for (int j = 0; j < n; ++j) {
    inv(j, j) = cxd(inv(j, j).real(), 0.0);
    for (int i = j + 1; i < n; ++i) {
      const cxd v = 0.5 * (inv(i, j) + std::conj(inv(j, i)));
      inv(i, j) = v;
      inv(j, i) = std::conj(v);
    }
  }
  return inv;
}

LuSolver::LuSolver(const RMat& a) : lu_(a), piv_(size_t(a.rows())) {
  require(a.rows() == a.cols(), "lu: matrix not square");
  const int n = a.rows();
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(lu_(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best))
      fail(Errc::singular_system, "lu: singular matrix");
    piv_[size_t(k)] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
    const double inv_piv = 1.0 / lu_(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = lu_(i, k) * inv_piv;
      lu_(i, k) = m;
      if (m != 0.0)
        for (int j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
    }
  }
}

std::vector<double> LuSolver::solve(const std::vector<double>& b) const {
  const int n = lu_.rows();
  require(int(b.size()) == n, "lu solve: shape mismatch");
  std::vector<double> x = b;
  // rows were fully exchanged during factorization, so permute first
  for (int k = 0; k < n; ++k)
    std::swap(x[size_t(k)], x[size_t(piv_[size_t(k)])]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) x[size_t(i)] -= lu_(i, k) * x[size_t(k)];
  for (int i = n - 1; i >= 0; --i) {
    double s = x[size_t(i)];
    for (int k = i + 1; k < n; ++k) s -= lu_(i, k) * x[size_t(k)];
    x[size_t(i)] = s / lu_(i, i);
  }
  return x;
}

}  // namespace ratebal
