#include "psgarch/risk.hpp"

#include "psgarch/distributions.hpp"

#include <cmath>

namespace psgarch::risk {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("risk: alpha must lie in (0, 1)");
}

void check_nu(double nu) {
  if (!(nu > 2.0) || !std::isfinite(nu)) throw InvalidInput("risk: nu must exceed 2");
}

bool near(double a, double b) { return std::fabs(a - b) < 1e-12; }

}  // namespace

double t_es_factor(double nu, double alpha) {
  check_nu(nu);
  check_alpha(alpha);
  const double q = dist::student_t_quantile(alpha, nu);
  return dist::student_t_pdf(q, nu) / (1.0 - alpha) * (nu + q * q) / (nu - 1.0) *
         std::sqrt((nu - 2.0) / nu);
}

double normal_es_factor(double alpha) {
  check_alpha(alpha);
  return dist::normal_pdf(dist::normal_quantile(alpha)) / (1.0 - alpha);
}

double var_factor(Innovation d, double nu, double alpha) {
  check_alpha(alpha);
  if (d == Innovation::Normal) return dist::normal_quantile(alpha);
  check_nu(nu);
  return dist::student_t_quantile(alpha, nu) * std::sqrt((nu - 2.0) / nu);
}

double es_factor(Innovation d, double nu, double alpha) {
  return d == Innovation::Normal ? normal_es_factor(alpha) : t_es_factor(nu, alpha);
}

double alpha_star(double nu, double alpha) {
  return dist::student_t_cdf(t_es_factor(nu, alpha) * std::sqrt(nu / (nu - 2.0)), nu);
}

double alpha_star_normal(double alpha) { return dist::normal_cdf(normal_es_factor(alpha)); }

std::string to_string(Zone z) {
  switch (z) {
    case Zone::Green: return "green";
    case Zone::Yellow: return "yellow";
    case Zone::Red: return "red";
  }
  return "unknown";
}

Zone traffic_light(std::size_t pot, double alpha, std::size_t horizon) {
  if (horizon != 250) throw InvalidConfiguration("traffic_light: only a 250-day horizon is supported");
  std::size_t green_max, yellow_max;
  if (near(alpha, 0.99)) {
    green_max = 4;
    yellow_max = 9;
  } else if (near(alpha, 0.975)) {
    green_max = 10;
    yellow_max = 17;
  } else {
    throw InvalidConfiguration("traffic_light: alpha must be 0.99 or 0.975");
  }
  if (pot <= green_max) return Zone::Green;
  if (pot <= yellow_max) return Zone::Yellow;
  return Zone::Red;
}

ForecastState ForecastState::from_fit(const semigarch::SemiGarchFit& fit) {
  if (fit.xi.empty()) throw InvalidInput("ForecastState: empty fit");
  ForecastState s;
  s.mean = fit.returns.mean;
  s.v_last = fit.scale.v_hat.back();
  s.xi_last = fit.xi.back();
  s.h_last = fit.h.back();
  s.garch = fit.garch;
  return s;
}

RiskForecast rolling_forecast(const ForecastState& state, std::span<const double> future_returns,
                              double alpha) {
  if (future_returns.empty()) throw InvalidInput("rolling_forecast: no out-of-sample returns");
  if (!(state.v_last > 0.0) || !(state.h_last > 0.0)) {
    throw InvalidInput("rolling_forecast: scale and conditional variance must be positive");
  }
  const auto& g = state.garch;
  const double q = var_factor(g.dist, g.nu, alpha);
  const double es = es_factor(g.dist, g.nu, alpha);
  const double scale = std::sqrt(state.v_last);

  RiskForecast out;
  out.horizon = future_returns.size();
  out.alpha = alpha;
  out.h_path.reserve(out.horizon);
  out.var_path.reserve(out.horizon);
  out.es_path.reserve(out.horizon);
  out.losses.reserve(out.horizon);

  double h = state.h_last;
  double xi_prev = state.xi_last;
  for (double r : future_returns) {
    if (!std::isfinite(r)) throw InvalidInput("rolling_forecast: non-finite return");
    h = g.alpha0 + g.alpha1 * xi_prev * xi_prev + g.beta1 * h;
    const double sigma = scale * std::sqrt(h);
    const double var = -state.mean + sigma * q;
    const double shortfall = -state.mean + sigma * es;
    const double loss = -r;
    out.h_path.push_back(h);
    out.var_path.push_back(var);
    out.es_path.push_back(shortfall);
    out.losses.push_back(loss);
    if (loss > var) ++out.pot_var;
    if (loss > shortfall) ++out.pot_es;
    xi_prev = (r - state.mean) / scale;
  }
  if (out.horizon == 250 && (near(alpha, 0.99) || near(alpha, 0.975))) {
    out.zone = traffic_light(out.pot_var, alpha, out.horizon);
  }
  return out;
}

}  // namespace psgarch::risk
