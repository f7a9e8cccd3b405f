#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Dense helpers for the small (p <= ~10) symmetric systems this project
// solves: IRLS normal equations, sandwich covariance, copula correlation
// repair.  Deliberately self-contained; everything here is deterministic
// elementwise arithmetic so results do not depend on the kernel backend.

namespace aitc::linalg {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {a_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {a_.data() + i * cols_, cols_};
  }
  const std::vector<double>& data() const { return a_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

// Cholesky A = L*L^T for symmetric positive definite A.
// Returns false when a pivot drops below tol * max diagonal.
bool cholesky(const Matrix& a, Matrix& lower, double tol = 1e-12);

// Solves A x = b for symmetric positive definite A (throws on failure).
std::vector<double> solve_spd(const Matrix& a, std::span<const double> b);

// Inverse of a symmetric positive definite matrix via Cholesky.
Matrix inverse_spd(const Matrix& a);

// Cyclic Jacobi eigendecomposition of a symmetric matrix:
// a = vectors * diag(values) * vectors^T, values descending.
void sym_eigen(const Matrix& a, Matrix& vectors, std::vector<double>& values);

// Symmetric square root of a positive semidefinite matrix; negative
// eigenvalues (roundoff) are clipped at zero.
Matrix psd_sqrt(const Matrix& a);

// Projects a symmetric matrix to the nearest correlation-like PSD matrix by
// eigenvalue clipping, then renormalizes the diagonal to 1.  Sets `adjusted`
// when any eigenvalue was clipped.
Matrix nearest_psd_correlation(const Matrix& a, bool& adjusted);

// Sample covariance with the n-1 denominator; rows are observations.
Matrix sample_covariance(const Matrix& x);

}  // namespace aitc::linalg
