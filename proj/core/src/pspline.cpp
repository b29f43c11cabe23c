#include "psgarch/pspline.hpp"

#include "psgarch/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace psgarch::pspline {

using linalg::Matrix;

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite value");
  }
}

void require_length(const SplineBasis& basis, std::span<const double> xs, const char* what) {
  if (xs.size() != basis.n()) {
    throw InvalidInput(std::string(what) + ": series length does not match the basis");
  }
}

// SVD of the stacked system [diag(s) Wᵀ ; lambda^p D].
// Its Gram matrix equals TᵀT + lambda^{2p} D, and with T = U diag(s) Wᵀ the
// smoother becomes S = U_T Utop Utopᵀ U_Tᵀ where Utop holds the first
// dim() rows of the left singular vectors.
struct PenalizedFactor {
  Matrix u_top;                 // dim x dim, columns beyond `rank` unused
  std::vector<double> sigma;
  Matrix v;
  std::vector<double> col_scale;
  std::size_t rank = 0;
};

PenalizedFactor factor_penalized(const SplineBasis& basis, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("pspline: lambda must be finite and >= 0");
  }
  const std::size_t k = basis.dim();
  const std::size_t knots = static_cast<std::size_t>(basis.knot_count());
  const std::size_t first_spline = static_cast<std::size_t>(basis.p() + 1);
  const double ridge = std::pow(lambda, basis.p());
  if (!std::isfinite(ridge)) throw InvalidInput("pspline: lambda^p overflows");

  const auto& s = basis.singular_values();
  const Matrix& w = basis.right_vectors();
  std::vector<double> stacked((k + knots) * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) stacked[i * k + j] = s[i] * w(j, i);
  for (std::size_t i = 0; i < knots; ++i) stacked[(k + i) * k + first_spline + i] = ridge;

  // Equilibrate the columns: for large lambda the penalized columns dwarf
  // the polynomial ones, which one-sided Jacobi would treat as noise.
  std::vector<double> col_scale(k, 0.0);
  for (std::size_t i = 0; i < k + knots; ++i)
    for (std::size_t j = 0; j < k; ++j) col_scale[j] += stacked[i * k + j] * stacked[i * k + j];
  for (auto& c : col_scale) c = c > 0.0 ? 1.0 / std::sqrt(c) : 0.0;
  for (std::size_t i = 0; i < k + knots; ++i)
    for (std::size_t j = 0; j < k; ++j) stacked[i * k + j] *= col_scale[j];

  PenalizedFactor out;
  auto svd = linalg::jacobi_svd(Matrix(k + knots, k, std::move(stacked)));
  const double cutoff = linalg::kDefaultPinvTol * svd.sigma.front();
  while (out.rank < k && svd.sigma[out.rank] > cutoff) ++out.rank;
  out.col_scale = std::move(col_scale);

  out.u_top = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < out.rank; ++j) out.u_top(i, j) = svd.u(i, j);
  out.sigma = std::move(svd.sigma);
  out.v = std::move(svd.v);
  return out;
}

std::vector<double> project_on_basis(const SplineBasis& basis, std::span<const double> y) {
  return linalg::mat_t_vec(basis.left_vectors(), y);
}

void smoother_traces(const PenalizedFactor& f, std::size_t k, double& tr_s, double& tr_s2) {
  tr_s = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < f.rank; ++j) tr_s += f.u_top(i, j) * f.u_top(i, j);
  tr_s2 = 0.0;
  for (std::size_t a = 0; a < f.rank; ++a) {
    for (std::size_t b = 0; b < f.rank; ++b) {
      double g = 0.0;
      for (std::size_t i = 0; i < k; ++i) g += f.u_top(i, a) * f.u_top(i, b);
      tr_s2 += g * g;
    }
  }
}

}  // namespace

SplineBasis build_basis(std::size_t n, int p, int knot_count, double pinv_tol) {
  if (!(pinv_tol > 0.0 && pinv_tol < 1.0)) {
    throw InvalidConfiguration("build_basis: pinv_tol must lie in (0, 1)");
  }
  if (p < 1) throw InvalidConfiguration("build_basis: spline order p must be >= 1");
  if (knot_count < 1) throw InvalidConfiguration("build_basis: need at least one knot");
  const std::size_t k = static_cast<std::size_t>(p + 1 + knot_count);
  if (n < 2 * k) {
    throw InvalidConfiguration("build_basis: n = " + std::to_string(n) +
                               " is too small for p = " + std::to_string(p) +
                               " and K = " + std::to_string(knot_count) +
                               " (need n >= 2(p+1+K))");
  }

  SplineBasis b;
  b.n_ = n;
  b.p_ = p;
  b.k_ = knot_count;
  b.pinv_tol_ = pinv_tol;
  b.tau_.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    b.tau_[t] = (static_cast<double>(t + 1) - 0.5) / static_cast<double>(n);
  }
  b.knots_.resize(static_cast<std::size_t>(knot_count));
  for (int i = 1; i <= knot_count; ++i) {
    b.knots_[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) / (knot_count + 1);
  }

  std::vector<double> entries(n * k, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double* row = entries.data() + t * k;
    const double tau = b.tau_[t];
    double power = 1.0;
    for (int j = 0; j <= p; ++j) {
      row[j] = power;
      power *= tau;
    }
    for (int i = 0; i < knot_count; ++i) {
      const double d = tau - b.knots_[static_cast<std::size_t>(i)];
      row[p + 1 + i] = d > 0.0 ? std::pow(d, p) : 0.0;
    }
  }
  b.design_ = Matrix(n, k, std::move(entries));

  b.penalty_mask_.assign(k, 0.0);
  for (std::size_t j = static_cast<std::size_t>(p + 1); j < k; ++j) b.penalty_mask_[j] = 1.0;

  auto svd = linalg::jacobi_svd(b.design_);
  const double cutoff = linalg::kDefaultPinvTol * svd.sigma.front();
  b.rank_ = 0;
  while (b.rank_ < k && svd.sigma[b.rank_] > cutoff) ++b.rank_;
  for (std::size_t j = b.rank_; j < k; ++j) {
    svd.sigma[j] = 0.0;
    for (std::size_t t = 0; t < n; ++t) svd.u(t, j) = 0.0;
  }
  b.u_ = std::move(svd.u);
  b.s_ = std::move(svd.sigma);
  b.w_ = std::move(svd.v);

  // pseudo_inverse(TᵀT) with its relative cutoff, taken from the factor of T.
  const double gram_cutoff = std::sqrt(pinv_tol) * b.s_.front();
  b.gram_rank_ = 0;
  while (b.gram_rank_ < b.rank_ && b.s_[b.gram_rank_] > gram_cutoff) ++b.gram_rank_;
  b.gram_pinv_ = Matrix(k, k);
  for (std::size_t r = 0; r < b.gram_rank_; ++r) {
    const double inv2 = 1.0 / (b.s_[r] * b.s_[r]);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) b.gram_pinv_(i, j) += b.w_(i, r) * b.w_(j, r) * inv2;
  }
  return b;
}

SmootherFit fit(const SplineBasis& basis, std::span<const double> y, double lambda) {
  require_length(basis, y, "fit");
  require_finite(y, "fit");
  const std::size_t k = basis.dim();
  const PenalizedFactor f = factor_penalized(basis, lambda);
  const std::vector<double> c = project_on_basis(basis, y);

  std::vector<double> phi(k, 0.0);
  for (std::size_t j = 0; j < f.rank; ++j) {
    double g = 0.0;
    for (std::size_t i = 0; i < k; ++i) g += f.u_top(i, j) * c[i];
    g /= f.sigma[j];
    for (std::size_t i = 0; i < k; ++i) phi[i] += f.v(i, j) * g;
  }

  SmootherFit out;
  out.lambda = lambda;
  out.coefficients.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.coefficients[i] = phi[i] * f.col_scale[i];
  out.fitted = linalg::mat_vec(basis.design(), out.coefficients);
  out.residuals.resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) out.residuals[t] = y[t] - out.fitted[t];
  smoother_traces(f, k, out.trace_s, out.trace_s2);
  return out;
}

double bias_component(const SplineBasis& basis, std::span<const double> m, double lambda) {
  const SmootherFit f = fit(basis, m, lambda);
  double ss = 0.0;
  for (double r : f.residuals) ss += r * r;
  return ss / static_cast<double>(basis.n());
}

double variance_component(const SplineBasis& basis, double lambda, double c_f) {
  if (!(c_f > 0.0) || !std::isfinite(c_f)) {
    throw InvalidInput("variance_component: c_f must be positive");
  }
  const PenalizedFactor f = factor_penalized(basis, lambda);
  double tr_s = 0.0, tr_s2 = 0.0;
  smoother_traces(f, basis.dim(), tr_s, tr_s2);
  return 2.0 * std::numbers::pi * c_f * tr_s2 / static_cast<double>(basis.n());
}

Matrix smoother_matrix(const SplineBasis& basis, double lambda) {
  if (basis.n() > 5000) throw InvalidInput("smoother_matrix: n too large for a dense smoother");
  const std::size_t n = basis.n(), k = basis.dim();
  const PenalizedFactor f = factor_penalized(basis, lambda);
  // Z = U_T Utop (n x rank); S = Z Zᵀ.
  Matrix z(n, f.rank);
  const Matrix& u = basis.left_vectors();
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < f.rank; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) acc += u(t, i) * f.u_top(i, j);
      z(t, j) = acc;
    }
  return linalg::matmul(z, linalg::transpose(z));
}

LambdaATerms lambda_a_terms(const SplineBasis& basis, std::span<const double> m_hat) {
  require_length(basis, m_hat, "lambda_a");
  require_finite(m_hat, "lambda_a");
  const std::size_t k = basis.dim();
  const std::size_t first_spline = static_cast<std::size_t>(basis.p() + 1);
  const auto& s = basis.singular_values();
  const Matrix& w = basis.right_vectors();
  const Matrix& pinv = basis.gram_pinv();

  LambdaATerms terms;
  for (std::size_t i = first_spline; i < k; ++i) terms.trace_pd += pinv(i, i);
  for (std::size_t i = first_spline; i < k; ++i)
    for (std::size_t j = first_spline; j < k; ++j) terms.trace_pd_sq += pinv(i, j) * pinv(j, i);

  // P Tᵀ m is the least-squares coefficient vector W diag(1/s) U_Tᵀ m, and
  // ||T P z|| = ||diag(1/s) Wᵀ z|| because U_T has orthonormal columns.
  const std::vector<double> c = project_on_basis(basis, m_hat);
  std::vector<double> coef(k, 0.0);
  for (std::size_t r = 0; r < basis.gram_rank(); ++r) {
    const double g = c[r] / s[r];
    for (std::size_t i = 0; i < k; ++i) coef[i] += w(i, r) * g;
  }
  for (std::size_t i = 0; i < first_spline; ++i) coef[i] = 0.0;
  double ss = 0.0;
  for (std::size_t r = 0; r < basis.gram_rank(); ++r) {
    double acc = 0.0;
    for (std::size_t i = first_spline; i < k; ++i) acc += w(i, r) * coef[i];
    acc /= s[r];
    ss += acc * acc;
  }
  terms.curvature = std::sqrt(ss);
  return terms;
}

double lambda_a(const SplineBasis& basis, std::span<const double> m_hat, double c_f,
                const LambdaAOptions& options) {
  if (!(c_f > 0.0) || !std::isfinite(c_f)) throw InvalidInput("lambda_a: c_f must be positive");
  const LambdaATerms t = lambda_a_terms(basis, m_hat);
  const double two_pi_cf = 2.0 * std::numbers::pi * c_f;
  const double curvature = options.squared_norm_denominator ? t.curvature * t.curvature
                                                            : t.curvature;
  const double num = two_pi_cf * t.trace_pd;
  const double den = curvature + two_pi_cf * t.trace_pd_sq;
  if (!(den > 0.0) || !(num > 0.0) || !std::isfinite(num / den)) {
    throw DegenerateInput("lambda_a: degenerate numerator or denominator");
  }
  return std::pow(num / den, 1.0 / (2.0 * basis.p()));
}

double kqa(int knot_count, double lambda, int p, std::size_t n) {
  if (knot_count < 1 || !(lambda > 0.0) || p < 1 || n == 0) {
    throw InvalidInput("kqa: all arguments must be positive");
  }
  const double q = p + 1.0;
  const double lambda_star = std::pow(lambda, 2.0 * p);
  return knot_count * std::pow(lambda_star * std::pow(std::numbers::pi, 2.0 * q), 1.0 / (2.0 * q)) *
         std::pow(static_cast<double>(n), -1.0 / (2.0 * q));
}

}  // namespace psgarch::pspline
