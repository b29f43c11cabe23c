#include "psgarch/ipi.hpp"

#include "psgarch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace psgarch::ipi {

int IpiConfig::knots_for(std::size_t n) const {
  if (knots) return *knots;
  return static_cast<int>(std::min<std::size_t>(n / 4, 40));
}

double IpiConfig::tol_for(std::size_t n) const {
  if (tol) return *tol;
  return 1.0 / static_cast<double>(n);
}

IpiResult select_lambda(std::span<const double> y, const IpiConfig& config) {
  const auto basis =
      pspline::build_basis(y.size(), config.p, config.knots_for(y.size()), config.pinv_tol);
  return select_lambda(basis, y, config);
}

IpiResult select_lambda(const pspline::SplineBasis& basis, std::span<const double> y,
                        const IpiConfig& config) {
  if (y.size() != basis.n()) throw InvalidInput("select_lambda: series length does not match basis");
  for (double v : y)
    if (!std::isfinite(v)) throw InvalidInput("select_lambda: non-finite observation");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*lo == *hi) throw DegenerateInput("select_lambda: constant series");
  if (!(config.lambda0 > 0.0)) throw InvalidConfiguration("select_lambda: lambda0 must be positive");
  if (config.max_iter < 1) throw InvalidConfiguration("select_lambda: max_iter must be >= 1");
  const double tol = config.tol_for(basis.n());
  if (!(tol > 0.0)) throw InvalidConfiguration("select_lambda: tol must be positive");

  const pspline::LambdaAOptions la_opts{config.squared_norm_denominator};
  const int knots = basis.knot_count();
  const int p = basis.p();
  const std::size_t n = basis.n();

  IpiResult res;
  res.kqa_trace.push_back(pspline::kqa(knots, config.lambda0, p, n));

  double lambda = config.lambda0;
  for (int i = 1; i <= config.max_iter; ++i) {
    const pspline::SmootherFit f = pspline::fit(basis, y, lambda);
    const spectral::SpectralEstimate sp = spectral::select_cf(f.residuals);
    const double updated = pspline::lambda_a(basis, f.fitted, sp.c_f, la_opts);

    IterationRecord rec{lambda, updated, sp.c_f, sp.window_width, pspline::kqa(knots, updated, p, n)};
    res.log.push_back(rec);
    res.kqa_trace.push_back(rec.kqa);
    res.cf_floor_hit = res.cf_floor_hit || sp.floor_applied;
    res.spectral = sp;
    res.iterations = i;

    const double change = std::fabs(updated - lambda);
    lambda = updated;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }

  res.lambda_hat = lambda;
  res.fit = pspline::fit(basis, y, lambda);
  res.large_knot_regime =
      std::all_of(res.kqa_trace.begin(), res.kqa_trace.end(), [](double v) { return v > 1.0; });
  return res;
}

}  // namespace psgarch::ipi
