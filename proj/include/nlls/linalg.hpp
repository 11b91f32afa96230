#pragma once

// Small dense linear algebra kernel used by the least-squares solver.
//
// Everything here is sized for problems with a few dozen unknowns: storage is
// dense and row-major, and no attempt is made at blocking or vectorization.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nlls {

using Vector = std::vector<double>;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Row-major initializer, e.g. DenseMatrix::from_rows({{1, 2}, {3, 4}}).
  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
bool all_finite(std::span<const double> v);

// y = a*x + y
void axpy(double a, std::span<const double> x, std::span<double> y);

Vector multiply(const DenseMatrix& a, std::span<const double> x);
Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x);
DenseMatrix transpose(const DenseMatrix& a);

// Largest eigenvalue of the symmetric matrix `a` (cyclic Jacobi sweeps).
double max_symmetric_eigenvalue(const DenseMatrix& a);
// Spectral norm ||J||_2, the square root of the largest eigenvalue of J^T J.
double spectral_norm(const DenseMatrix& j);

// The regularized Gram matrix J^T J + shift * I. Only `gram` constructs one,
// so the held matrix is always symmetric positive definite in exact
// arithmetic.
class SpdSystem {
 public:
  const DenseMatrix& matrix() const { return matrix_; }
  double shift() const { return shift_; }
  std::size_t size() const { return matrix_.rows(); }

  Vector apply(std::span<const double> x) const { return multiply(matrix_, x); }
  // q(s) = 0.5 s^T A s - b^T s
  double quadratic(std::span<const double> s, std::span<const double> b) const;

 private:
  friend SpdSystem gram(const DenseMatrix& j, double gamma);
  SpdSystem(DenseMatrix m, double shift) : matrix_(std::move(m)), shift_(shift) {}

  DenseMatrix matrix_;
  double shift_ = 0.0;
};

// Throws std::invalid_argument unless gamma > 0. The upper triangle is a
// copy of the lower one, so the result is bitwise symmetric.
SpdSystem gram(const DenseMatrix& j, double gamma);

// Returns std::nullopt when a nonpositive pivot shows up during the
// factorization, i.e. definiteness was lost to rounding.
std::optional<Vector> cholesky_solve(const SpdSystem& sys,
                                     std::span<const double> b);

struct CgResult {
  Vector solution;
  int iterations = 0;
  // ||b - A s|| / ||b||; above the requested tolerance when the iteration
  // budget ran out first.
  double final_rel_residual = 0.0;
  // q(s_k) for k = 0..iterations, filled only when requested.
  std::vector<double> model_values;
};

struct CgOptions {
  double rel_tol = 1e-4;
  int max_iters = 0;  // 0 means the system size
  bool record_model = false;
};

// Conjugate gradient on A s = b started from s = 0. The first iterate is the
// Cauchy point of q(s) = 0.5 s^T A s - b^T s and q never increases.
CgResult cg_solve(const SpdSystem& sys, std::span<const double> b,
                  const CgOptions& options);

}  // namespace nlls
