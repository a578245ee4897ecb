// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <cstdint>
#include <vector>

#include "ratebal/common.hpp"

namespace ratebal {

/// Column-major dense complex matrix. Sized for the small systems this
/// library works with (stream/antenna counts); storage is heap-backed and
/// the arithmetic routes through the runtime-dispatched simd kernels.
class CMat {
 public:
  CMat() = default;
  CMat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  static CMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  cxd& operator()(int i, int j) { return a_[size_t(j) * rows_ + i]; }
  const cxd& operator()(int i, int j) const { return a_[size_t(j) * rows_ + i]; }

  cxd* col(int j) { return a_.data() + size_t(j) * rows_; }
  const cxd* col(int j) const { return a_.data() + size_t(j) * rows_; }

  cxd* data() { return a_.data(); }
  const cxd* data() const { return a_.data(); }

  void set_zero();

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cxd> a_;
};

/// Column-major dense real matrix (coupling systems, power mappings).
class RMat {
 public:
  RMat() = default;
  RMat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  static RMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  double& operator()(int i, int j) { return a_[size_t(j) * rows_ + i]; }
  const double& operator()(int i, int j) const { return a_[size_t(j) * rows_ + i]; }

  double* col(int j) { return a_.data() + size_t(j) * rows_; }
  const double* col(int j) const { return a_.data() + size_t(j) * rows_; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

enum class Op : std::uint8_t { none, adjoint };

/// op(a) * op(b)
CMat gemm(Op opa, const CMat& a, Op opb, const CMat& b);

inline CMat operator*(const CMat& a, const CMat& b) {
  return gemm(Op::none, a, Op::none, b);
}

CMat adjoint(const CMat& a);
CMat operator+(const CMat& a, const CMat& b);
CMat operator-(const CMat& a, const CMat& b);

/// r += w * x * x^H for real weight w; preserves exact Hermitian symmetry.
void herm_rank1_update(CMat& r, double w, const cxd* x);

/// a * a^H, exactly Hermitian.
CMat gram(const CMat& a);

/// a^H * a, exactly Hermitian.
CMat gram_adj(const CMat& a);

/// Scale column j by s (real), in place.
void scale_col(CMat& a, int j, double s);

double norm_fro(const CMat& a);
double max_abs_diff(const CMat& a, const CMat& b);

/// y = a * x for real matrix and vector.
std::vector<double> matvec(const RMat& a, const std::vector<double>& x);

/// Cholesky factorization of a Hermitian positive definite matrix.
/// Reads the lower triangle. Throws Errc::singular_system when the pivot
/// fails (matrix not positive definite to working precision).
class CholeskyLLT {
 public:
  explicit CholeskyLLT(const CMat& a);

  /// b := a^{-1} b (per column).
  void solve_in_place(CMat& b) const;
  CMat solve(const CMat& b) const;
  std::vector<cxd> solve(const std::vector<cxd>& b) const;

  /// ln det of the factored matrix (real; matrix is HPD).
  double log_det() const;

  /// a^{-1}, re-hermitized.
  CMat inverse() const;

 private:
  CMat l_;
};

/// LU factorization with partial pivoting for small real square systems.
class LuSolver {
 public:
  explicit LuSolver(const RMat& a);

  std::vector<double> solve(const std::vector<double>& b) const;

 private:
  RMat lu_;
  std::vector<int> piv_;
};

}  // namespace ratebal
