#include "psgarch/spectral.hpp"

#include "psgarch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psgarch::spectral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_width(const AcfEstimate& acf, std::size_t m) {
  if (m < 1 || m > acf.max_lag()) {
    throw InvalidInput("spectral: window width must lie in [1, max_lag]");
  }
}

double bartlett(std::size_t l, std::size_t m) {
  return 1.0 - static_cast<double>(l) / (static_cast<double>(m) + 0.5);
}

std::size_t clamp_width(double w, std::size_t upper) {
  if (!(w >= 1.0)) return 1;  // also catches NaN
  if (w >= static_cast<double>(upper)) return upper;
  return static_cast<std::size_t>(w);
}

}  // namespace

AcfEstimate autocovariance(std::span<const double> x, std::size_t max_lag, bool remove_mean) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidInput("autocovariance: empty series");
  if (max_lag >= n) throw InvalidInput("autocovariance: max_lag must be smaller than n");
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidInput("autocovariance: non-finite value");
  }
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
    throw DegenerateInput("autocovariance: constant series");
  }

  double mean = 0.0;
  if (remove_mean) {
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
  }
  std::vector<double> d(n);
  for (std::size_t t = 0; t < n; ++t) d[t] = x[t] - mean;

  AcfEstimate acf;
  acf.n = n;
  acf.mean_removed = remove_mean;
  acf.gamma.assign(max_lag + 1, 0.0);
  for (std::size_t l = 0; l <= max_lag; ++l) {
    double s = 0.0;
    for (std::size_t t = 0; t + l < n; ++t) s += d[t] * d[t + l];
    acf.gamma[l] = s / static_cast<double>(n);
  }
  if (!(acf.gamma[0] > 0.0)) throw DegenerateInput("autocovariance: zero variance");
  return acf;
}

double lag_window_cf(const AcfEstimate& acf, std::size_t m) {
  return spectral_density(acf, m, 0.0);
}

double spectral_density(const AcfEstimate& acf, std::size_t m, double omega) {
  check_width(acf, m);
  double s = acf.gamma[0];
  for (std::size_t l = 1; l <= m; ++l) {
    s += 2.0 * bartlett(l, m) * acf.gamma[l] * std::cos(static_cast<double>(l) * omega);
  }
  return s / kTwoPi;
}

double generalized_derivative(const AcfEstimate& acf, std::size_t m, double omega) {
  check_width(acf, m);
  double s = 0.0;
  for (std::size_t l = 1; l <= m; ++l) {
    s += 2.0 * static_cast<double>(l) * acf.gamma[l] * std::cos(static_cast<double>(l) * omega);
  }
  return s / kTwoPi;
}

SpectralIntegrals generalized_derivative_integrals(const AcfEstimate& acf, std::size_t m) {
  check_width(acf, m);
  // Cosine-series coefficients of f and f^(1).
  std::vector<double> a(m + 1), b(m + 1);
  a[0] = acf.gamma[0] / kTwoPi;
  b[0] = 0.0;
  for (std::size_t l = 1; l <= m; ++l) {
    a[l] = 2.0 * bartlett(l, m) * acf.gamma[l] / kTwoPi;
    b[l] = 2.0 * static_cast<double>(l) * acf.gamma[l] / kTwoPi;
  }

  const int grid = kGridPoints;
  const double h = std::numbers::pi / (grid - 1);
  double sum_f2 = 0.0, sum_f1 = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double omega = i * h;
    const double c1 = std::cos(omega);
    double prev = 1.0, cur = c1;  // cos(0), cos(omega)
    double f = a[0], f1 = b[0];
    for (std::size_t l = 1; l <= m; ++l) {
      f += a[l] * cur;
      f1 += b[l] * cur;
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
    }
    const double weight = (i == 0 || i == grid - 1) ? 0.5 : 1.0;
    sum_f2 += weight * f * f;
    sum_f1 += weight * f1 * f1;
  }

  SpectralIntegrals out;
  out.int_f2 = 2.0 * h * sum_f2;
  out.int_f1_sq = 2.0 * h * sum_f1;
  double f1_zero = 0.0;
  for (std::size_t l = 1; l <= m; ++l) f1_zero += b[l];
  out.f1_at_zero = f1_zero;
  return out;
}

SpectralEstimate select_cf(std::span<const double> x, const SelectOptions& options) {
  const std::size_t n = x.size();
  if (n < 20) throw InvalidInput("select_cf: need at least 20 observations");
  const std::size_t half = n / 2;
  const AcfEstimate acf = autocovariance(x, half);

  const double nd = static_cast<double>(n);
  const double inflation = std::pow(nd, 2.0 / 21.0);
  const double n13 = std::cbrt(nd);

  SpectralEstimate est;
  std::size_t width = clamp_width(static_cast<double>(options.initial_width.value_or(half)), half);

  // Global stage.
  for (int j = 1; j <= kMaxGlobalIterations; ++j) {
    est.iterations = j;
    const std::size_t inflated = clamp_width(std::floor(static_cast<double>(width) / inflation), half);
    const SpectralIntegrals ints = generalized_derivative_integrals(acf, inflated);
    if (!(ints.int_f2 > 0.0)) throw DegenerateInput("select_cf: vanishing spectral estimate");
    const double raw = n13 * std::cbrt(3.0 * ints.int_f1_sq / (2.0 * ints.int_f2));
    const std::size_t next = clamp_width(std::floor(raw), half);
    const std::size_t diff = next > width ? next - width : width - next;
    width = next;
    if (diff <= 1) {
      est.converged = true;
      break;
    }
  }
  est.global_width = width;

  // Local adaptation at frequency zero.
  const std::size_t inflated = clamp_width(std::floor(static_cast<double>(width) / inflation), half);
  const double f0 = spectral_density(acf, inflated, 0.0);
  const double f1 = generalized_derivative(acf, inflated, 0.0);
  std::size_t local;
  if (!(f0 > 0.0) || !std::isfinite(f1) || std::fabs(f1) <= 1e-12 * f0) {
    est.derivative_fallback = true;
    local = clamp_width(std::floor(n13), half);
  } else {
    local = clamp_width(std::floor(n13 * std::cbrt(3.0 * f1 * f1 / (4.0 * f0 * f0))), half);
  }
  est.window_width = local;

  double c_f = lag_window_cf(acf, local);
  if (!(c_f >= kCfFloor)) {
    c_f = kCfFloor;
    est.floor_applied = true;
  }
  est.c_f = c_f;
  return est;
}

}  // namespace psgarch::spectral
