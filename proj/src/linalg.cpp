#include "nlls/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace nlls {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw std::invalid_argument("from_rows: ragged rows");
    }
    std::copy(row.begin(), row.end(), m.data_.begin() + i * c);
    ++i;
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  // Scaled accumulation so that entries near the overflow threshold still
  // produce a finite norm.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) {
    const double t = x / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw std::invalid_argument("multiply: size mismatch");
  }
  Vector y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x);
  return y;
}

Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) {
    throw std::invalid_argument("multiply_transposed: size mismatch");
  }
  Vector y(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) axpy(x[r], a.row(r), y);
  return y;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

double max_symmetric_eigenvalue(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) {
    throw std::invalid_argument("max_symmetric_eigenvalue: not square");
  }
  if (n == 0) return 0.0;
  DenseMatrix m = a;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      diag += m(p, p) * m(p, p);
      for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    }
    if (off <= 1e-32 * diag || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  double best = m(0, 0);
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, m(i, i));
  return best;
}

double spectral_norm(const DenseMatrix& j) {
  DenseMatrix jtj(j.cols(), j.cols());
  for (std::size_t r = 0; r < j.rows(); ++r) {
    const auto row = j.row(r);
    for (std::size_t a = 0; a < j.cols(); ++a)
      for (std::size_t b = 0; b <= a; ++b) jtj(a, b) += row[a] * row[b];
  }
  for (std::size_t a = 0; a < j.cols(); ++a)
    for (std::size_t b = 0; b < a; ++b) jtj(b, a) = jtj(a, b);
  return std::sqrt(std::max(0.0, max_symmetric_eigenvalue(jtj)));
}

double SpdSystem::quadratic(std::span<const double> s,
                            std::span<const double> b) const {
  const Vector as = apply(s);
  return 0.5 * dot(s, as) - dot(b, s);
}

SpdSystem gram(const DenseMatrix& j, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gram: shift must be positive");
  }
  const std::size_t n = j.cols();
  DenseMatrix m(n, n);
  for (std::size_t r = 0; r < j.rows(); ++r) {
    const auto row = j.row(r);
    for (std::size_t a = 0; a < n; ++a) {
      if (row[a] == 0.0) continue;
      for (std::size_t b = 0; b <= a; ++b) m(a, b) += row[a] * row[b];
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    m(a, a) += gamma;
    for (std::size_t b = 0; b < a; ++b) m(b, a) = m(a, b);
  }
  return SpdSystem(std::move(m), gamma);
}

std::optional<Vector> cholesky_solve(const SpdSystem& sys,
                                     std::span<const double> b) {
  const std::size_t n = sys.size();
  if (b.size() != n) {
    throw std::invalid_argument("cholesky_solve: size mismatch");
  }
  // Lower factor L with A = L L^T, stored in place.
  DenseMatrix l = sys.matrix();
  for (std::size_t k = 0; k < n; ++k) {
    double d = l(k, k);
    for (std::size_t p = 0; p < k; ++p) d -= l(k, p) * l(k, p);
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    const double lkk = std::sqrt(d);
    l(k, k) = lkk;
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = l(i, k);
      for (std::size_t p = 0; p < k; ++p) v -= l(i, p) * l(k, p);
      l(i, k) = v / lkk;
    }
  }
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < i; ++p) y[i] -= l(i, p) * y[p];
    y[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t p = i + 1; p < n; ++p) y[i] -= l(p, i) * y[p];
    y[i] /= l(i, i);
  }
  if (!all_finite(y)) return std::nullopt;
  return y;
}

CgResult cg_solve(const SpdSystem& sys, std::span<const double> b,
                  const CgOptions& options) {
  const std::size_t n = sys.size();
  if (b.size() != n) throw std::invalid_argument("cg_solve: size mismatch");
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) {
    throw std::invalid_argument("cg_solve: rel_tol must lie in (0, 1)");
  }
  const int max_iters =
      options.max_iters > 0 ? options.max_iters : static_cast<int>(n);

  CgResult out;
  out.solution.assign(n, 0.0);
  if (options.record_model) out.model_values.push_back(0.0);

  const double b_norm = norm2(b);
  if (b_norm == 0.0) return out;

  Vector r(b.begin(), b.end());
  Vector p = r;
  double rr = dot(r, r);
  const double target = options.rel_tol * b_norm;
  [[maybe_unused]] double q_prev = 0.0;

  while (out.iterations < max_iters) {
    if (std::sqrt(rr) <= target) {
      // The recurrence drifts from b - A s on ill-conditioned systems; trust
      // it only after checking the true residual, and restart if needed.
      Vector res(b.begin(), b.end());
      axpy(-1.0, sys.apply(out.solution), res);
      const double true_rr = dot(res, res);
      if (std::sqrt(true_rr) <= target) break;
      r = std::move(res);
      p = r;
      rr = true_rr;
    }
    const Vector ap = sys.apply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    axpy(alpha, p, out.solution);
    axpy(-alpha, ap, r);
    ++out.iterations;
    const double rr_next = dot(r, r);
    if (options.record_model) {
      const double q = sys.quadratic(out.solution, b);
      out.model_values.push_back(q);
      assert(q <= q_prev + 1e-12 * std::abs(q_prev));
      q_prev = q;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  const Vector as = sys.apply(out.solution);
  Vector res(b.begin(), b.end());
  axpy(-1.0, as, res);
  out.final_rel_residual = norm2(res) / b_norm;
  return out;
}

}  // namespace nlls
