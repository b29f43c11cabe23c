#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace psgarch::linalg {

inline constexpr double kDefaultPinvTol = 1e-12;

// Dense row-major matrix of doubles. Entries are checked to be finite on
// construction; all operations below are pure and return new values.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const { return entries_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> mat_vec(const Matrix& a, std::span<const double> x);
// aᵀ x without forming the transpose.
std::vector<double> mat_t_vec(const Matrix& a, std::span<const double> x);
double trace(const Matrix& a);
double frobenius(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

// Thin singular value decomposition a = U diag(sigma) Vᵀ for rows >= cols,
// singular values sorted in decreasing order. Columns of U belonging to a
// zero singular value are zero.
struct Svd {
  Matrix u;                    // rows x cols
  std::vector<double> sigma;   // cols
  Matrix v;                    // cols x cols
  int sweeps = 0;
};

// One-sided (Hestenes) Jacobi SVD. Throws NumericFailure if the sweeps do
// not converge and InvalidInput if rows < cols or the matrix is empty.
Svd jacobi_svd(const Matrix& a);

// Moore-Penrose inverse. Singular values below tol * sigma_max are treated
// as zero. Works for any shape.
Matrix pseudo_inverse(const Matrix& a, double tol = kDefaultPinvTol);

}  // namespace psgarch::linalg
