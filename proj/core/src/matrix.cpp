#include "psgarch/matrix.hpp"

#include "psgarch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace psgarch::linalg {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw InvalidInput(std::string(what) + ": non-finite entry");
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw InvalidInput("Matrix: non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw InvalidInput("Matrix: entries length does not match rows x cols");
  }
  require_finite(entries_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidInput("Matrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  require_finite(entries_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  require_finite(diag, "Matrix::diagonal");
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("matmul: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

std::vector<double> mat_vec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InvalidInput("mat_vec: dimension mismatch");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

std::vector<double> mat_t_vec(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw InvalidInput("mat_t_vec: dimension mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

double trace(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("trace: matrix is not square");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double frobenius(const Matrix& a) {
  // Scaled accumulation keeps tiny and huge entries from under/overflowing.
  double scl = 0.0, ssq = 1.0;
  for (double x : a.data()) {
    if (x == 0.0) continue;
    const double ax = std::fabs(x);
    if (scl < ax) {
      ssq = 1.0 + ssq * (scl / ax) * (scl / ax);
      scl = ax;
    } else {
      ssq += (ax / scl) * (ax / scl);
    }
  }
  return scl * std::sqrt(ssq);
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("add: dimension mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("subtract: dimension mismatch");
  }
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

Svd jacobi_svd(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) throw InvalidInput("jacobi_svd: empty matrix");
  if (m < n) throw InvalidInput("jacobi_svd: requires rows >= cols");
  require_finite(a.data(), "jacobi_svd");

  // Column-major working copies so that column rotations touch contiguous memory.
  std::vector<std::vector<double>> col(n, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) col[j][i] = a(i, j);
  std::vector<std::vector<double>> vcol(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) vcol[j][j] = 1.0;

  constexpr int kMaxSweeps = 80;
  const double kTol = std::numeric_limits<double>::epsilon() * static_cast<double>(m);
  std::vector<double> norm2(n);
  for (std::size_t j = 0; j < n; ++j) norm2[j] = dot(col[j], col[j]);

  // Columns at the rounding floor of the largest one cannot be made
  // orthogonal to working precision; they are left alone.
  const double max_norm2 = *std::max_element(norm2.begin(), norm2.end());
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor2 = max_norm2 * eps * eps * static_cast<double>(m);

  int sweep = 0;
  bool converged = false;
  while (sweep < kMaxSweeps && !converged) {
    ++sweep;
    converged = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double alpha = norm2[i], beta = norm2[j];
        if (alpha <= floor2 || beta <= floor2) continue;
        const double gamma = dot(col[i], col[j]);
        if (std::fabs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        auto& ci = col[i];
        auto& cj = col[j];
        for (std::size_t r = 0; r < m; ++r) {
          const double x = ci[r], y = cj[r];
          ci[r] = c * x - s * y;
          cj[r] = s * x + c * y;
        }
        auto& vi = vcol[i];
        auto& vj = vcol[j];
        for (std::size_t r = 0; r < n; ++r) {
          const double x = vi[r], y = vj[r];
          vi[r] = c * x - s * y;
          vj[r] = s * x + c * y;
        }
        norm2[i] = dot(ci, ci);
        norm2[j] = dot(cj, cj);
      }
    }
  }
  if (!converged) throw NumericFailure("jacobi_svd: sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) sig[j] = std::sqrt(dot(col[j], col[j]));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  Svd out{Matrix(m, n), std::vector<double>(n), Matrix(n, n), sweep};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sig[j];
    const double inv = sig[j] > 0.0 ? 1.0 / sig[j] : 0.0;
    for (std::size_t r = 0; r < m; ++r) out.u(r, k) = col[j][r] * inv;
    for (std::size_t r = 0; r < n; ++r) out.v(r, k) = vcol[j][r];
  }
  return out;
}

Matrix pseudo_inverse(const Matrix& a, double tol) {
  if (a.empty()) throw InvalidInput("pseudo_inverse: empty matrix");
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidInput("pseudo_inverse: tol must lie in (0, 1)");
  if (a.rows() < a.cols()) return transpose(pseudo_inverse(transpose(a), tol));

  const Svd svd = jacobi_svd(a);
  const std::size_t m = a.rows(), n = a.cols();
  const double cutoff = tol * svd.sigma.front();
  Matrix p(n, m);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(svd.sigma[k] > cutoff)) break;
    const double inv = 1.0 / svd.sigma[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = svd.v(i, k) * inv;
      if (vik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) p(i, j) += vik * svd.u(j, k);
    }
  }
  return p;
}

}  // namespace psgarch::linalg
