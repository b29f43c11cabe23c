#include "psgarch/semigarch.hpp"

#include "psgarch/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace psgarch::semigarch {

namespace {

constexpr double kSumCap = 1.0 - 1e-6;
constexpr double kMinNu = 4.0;
constexpr double kMaxNu = 100.0;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Unconstrained coordinates: theta = (u, v[, w]) with
//   alpha1 + beta1 = kSumCap * logistic(u), alpha1 = (alpha1 + beta1) * logistic(v),
//   nu = kMinNu + (kMaxNu - kMinNu) * logistic(w).
GarchParams from_theta(const std::vector<double>& th, Innovation dist, std::optional<double> fixed_nu) {
  const double total = kSumCap * logistic(th[0]);
  const double share = logistic(th[1]);
  double nu = 0.0;
  if (dist == Innovation::StudentT) nu = fixed_nu ? *fixed_nu : kMinNu + (kMaxNu - kMinNu) * logistic(th[2]);
  return GarchParams::make(total * share, total * (1.0 - share), dist, nu);
}

std::vector<double> to_theta(double alpha1, double beta1, Innovation dist, bool estimate_nu,
                             double nu0) {
  const double total = alpha1 + beta1;
  std::vector<double> th{logit(total / kSumCap), logit(alpha1 / total)};
  if (dist == Innovation::StudentT && estimate_nu) th.push_back(logit((nu0 - kMinNu) / (kMaxNu - kMinNu)));
  return th;
}

double neg_loglik(const GarchParams& g, std::span<const double> xi) {
  const double ll = garch_loglik(g, xi);
  return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
}

ScaleFit scale_from_ipi(const ReturnSeries& rs, ipi::IpiResult res, std::size_t replaced) {
  ScaleFit sf;
  sf.zero_replacements = replaced;
  sf.lambda_hat = res.lambda_hat;
  sf.m_hat = res.fit.fitted;
  const std::size_t n = rs.centered.size();
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) acc += rs.centered[t] * rs.centered[t] / std::exp(sf.m_hat[t]);
  sf.c_eps = acc / static_cast<double>(n);
  if (!(sf.c_eps > 0.0) || !std::isfinite(sf.c_eps)) {
    throw DegenerateInput("estimate_scale: non-positive scale constant");
  }
  sf.v_hat.resize(n);
  for (std::size_t t = 0; t < n; ++t) sf.v_hat[t] = sf.c_eps * std::exp(sf.m_hat[t]);
  sf.ipi = std::move(res);
  return sf;
}

}  // namespace

ReturnSeries from_returns(std::span<const double> returns) {
  if (returns.empty()) throw InvalidInput("from_returns: empty series");
  ReturnSeries rs;
  rs.returns.assign(returns.begin(), returns.end());
  for (double r : rs.returns) {
    if (!std::isfinite(r)) throw InvalidInput("from_returns: non-finite return");
  }
  const std::size_t n = rs.returns.size();
  double s = 0.0;
  for (double r : rs.returns) s += r;
  rs.mean = s / static_cast<double>(n);
  rs.centered.resize(n);
  rs.tau.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    rs.centered[t] = rs.returns[t] - rs.mean;
    rs.tau[t] = (static_cast<double>(t + 1) - 0.5) / static_cast<double>(n);
  }
  return rs;
}

ReturnSeries to_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw InvalidInput("to_returns: need at least two prices");
  std::vector<double> r(prices.size() - 1);
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (!(prices[t] > 0.0) || !std::isfinite(prices[t])) {
      throw InvalidInput("to_returns: prices must be positive and finite (row " +
                         std::to_string(t + 1) + ")");
    }
  }
  for (std::size_t t = 1; t < prices.size(); ++t) r[t - 1] = std::log(prices[t]) - std::log(prices[t - 1]);
  return from_returns(r);
}

std::vector<double> log_transform(const ReturnSeries& rs, std::size_t* replaced) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double r : rs.centered) {
    if (r != 0.0) smallest = std::min(smallest, std::fabs(r));
  }
  if (!std::isfinite(smallest)) throw DegenerateInput("log_transform: all centered returns are zero");
  std::size_t count = 0;
  std::vector<double> y(rs.centered.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    double r = rs.centered[t];
    if (r == 0.0) {
      r = smallest;
      ++count;
    }
    y[t] = std::log(r * r);
  }
  if (replaced) *replaced = count;
  return y;
}

ScaleFit estimate_scale(const ReturnSeries& rs, const ipi::IpiConfig& config) {
  const auto basis = pspline::build_basis(rs.centered.size(), config.p,
                                          config.knots_for(rs.centered.size()), config.pinv_tol);
  return estimate_scale(basis, rs, config);
}

ScaleFit estimate_scale(const pspline::SplineBasis& basis, const ReturnSeries& rs,
                        const ipi::IpiConfig& config) {
  std::size_t replaced = 0;
  const std::vector<double> y = log_transform(rs, &replaced);
  return scale_from_ipi(rs, ipi::select_lambda(basis, y, config), replaced);
}

std::string to_string(Innovation d) { return d == Innovation::Normal ? "normal" : "t"; }

Innovation innovation_from_string(const std::string& name) {
  if (name == "normal" || name == "norm") return Innovation::Normal;
  if (name == "t" || name == "std" || name == "student-t") return Innovation::StudentT;
  throw InvalidConfiguration("unknown innovation distribution '" + name + "'");
}

GarchParams GarchParams::make(double alpha1, double beta1, Innovation dist, double nu) {
  if (!(alpha1 >= 0.0) || !(beta1 >= 0.0) || !(alpha1 + beta1 < 1.0)) {
    throw InvalidInput("GarchParams: need alpha1, beta1 >= 0 and alpha1 + beta1 < 1");
  }
  if (dist == Innovation::StudentT && !(nu > kMinNu)) {
    throw InvalidInput("GarchParams: student-t innovations need nu > 4");
  }
  GarchParams g;
  g.alpha1 = alpha1;
  g.beta1 = beta1;
  g.alpha0 = 1.0 - alpha1 - beta1;
  g.dist = dist;
  g.nu = dist == Innovation::StudentT ? nu : 0.0;
  return g;
}

std::vector<double> garch_filter(const GarchParams& params, std::span<const double> xi,
                                 double h_init) {
  std::vector<double> h(xi.size());
  if (xi.empty()) return h;
  h[0] = h_init;
  for (std::size_t t = 1; t < xi.size(); ++t) {
    h[t] = params.alpha0 + params.alpha1 * xi[t - 1] * xi[t - 1] + params.beta1 * h[t - 1];
  }
  return h;
}

double garch_loglik(const GarchParams& g, std::span<const double> xi) {
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double ll = 0.0;
  double h = 1.0;
  double t_const = 0.0;
  if (g.dist == Innovation::StudentT) {
    t_const = std::lgamma(0.5 * (g.nu + 1.0)) - std::lgamma(0.5 * g.nu) -
              0.5 * std::log(std::numbers::pi * (g.nu - 2.0));
  }
  for (std::size_t t = 0; t < xi.size(); ++t) {
    if (t > 0) h = g.alpha0 + g.alpha1 * xi[t - 1] * xi[t - 1] + g.beta1 * h;
    const double z2 = xi[t] * xi[t] / h;
    if (g.dist == Innovation::Normal) {
      ll -= 0.5 * (log2pi + std::log(h) + z2);
    } else {
      ll += t_const - 0.5 * std::log(h) - 0.5 * (g.nu + 1.0) * std::log1p(z2 / (g.nu - 2.0));
    }
  }
  return ll;
}

GarchParams fit_unit_garch(std::span<const double> xi, Innovation dist, const GarchFitOptions& options) {
  if (xi.size() < 250) throw InvalidInput("fit_unit_garch: need at least 250 observations");
  double ms = 0.0;
  for (double x : xi) {
    if (!std::isfinite(x)) throw InvalidInput("fit_unit_garch: non-finite value");
    ms += x * x;
  }
  ms /= static_cast<double>(xi.size());
  if (std::fabs(ms - 1.0) > 0.1) {
    throw InvalidInput("fit_unit_garch: standardized series must have unit variance (got " +
                       std::to_string(ms) + ")");
  }
  if (options.fixed_nu && !(*options.fixed_nu > kMinNu)) {
    throw InvalidInput("fit_unit_garch: nu must exceed 4");
  }
  const bool estimate_nu = dist == Innovation::StudentT && !options.fixed_nu;

  auto objective = [&](const std::vector<double>& th) {
    for (double v : th) {
      if (!std::isfinite(v) || std::fabs(v) > 40.0) return std::numeric_limits<double>::max();
    }
    return neg_loglik(from_theta(th, dist, options.fixed_nu), xi);
  };

  const std::array<std::array<double, 2>, 3> starts{{{0.05, 0.90}, {0.10, 0.70}, {0.02, 0.50}}};
  optim::NelderMeadResult best;
  best.fx = std::numeric_limits<double>::infinity();
  const std::vector<double> step(estimate_nu ? 3 : 2, 0.5);
  for (const auto& s : starts) {
    const auto th0 = to_theta(s[0], s[1], dist, estimate_nu, 8.0);
    auto res = optim::nelder_mead(objective, th0, step);
    // Restart from the optimum to guard against a collapsed simplex.
    res = optim::nelder_mead(objective, res.x, std::vector<double>(step.size(), 0.1));
    if (res.fx < best.fx) best = std::move(res);
  }

  GarchParams out = from_theta(best.x, dist, options.fixed_nu);
  out.loglik = -best.fx;
  if (!best.converged || !std::isfinite(best.fx)) {
    throw GarchFitFailure("fit_unit_garch: likelihood optimizer did not converge", out);
  }
  return out;
}

SemiGarchFit fit_semigarch(const ReturnSeries& rs, const ipi::IpiConfig& config, Innovation dist,
                           const GarchFitOptions& options) {
  const auto basis = pspline::build_basis(rs.centered.size(), config.p,
                                          config.knots_for(rs.centered.size()), config.pinv_tol);
  return fit_semigarch(basis, rs, config, dist, options);
}

SemiGarchFit fit_semigarch(const pspline::SplineBasis& basis, const ReturnSeries& rs,
                           const ipi::IpiConfig& config, Innovation dist,
                           const GarchFitOptions& options) {
  SemiGarchFit out;
  out.returns = rs;
  out.scale = estimate_scale(basis, rs, config);
  const std::size_t n = rs.centered.size();
  out.xi.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.xi[t] = rs.centered[t] / std::sqrt(out.scale.v_hat[t]);
  out.garch = fit_unit_garch(out.xi, dist, options);
  out.h = garch_filter(out.garch, out.xi);
  out.sigma_total.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.sigma_total[t] = std::sqrt(out.scale.v_hat[t] * out.h[t]);
  return out;
}

}  // namespace psgarch::semigarch
