#pragma once

#include "psgarch/semigarch.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psgarch::risk {

using semigarch::Innovation;

// Expected shortfall of the variance-one rescaled t distribution:
//   f_nu(q)/(1-alpha) * (nu + q^2)/(nu - 1) * sqrt((nu-2)/nu),  q = t_nu^{-1}(alpha).
// Requires nu > 2.
double t_es_factor(double nu, double alpha);

// Expected shortfall of the standard normal, phi(z_alpha)/(1-alpha).
double normal_es_factor(double alpha);

// alpha-quantile of the unit-variance innovation distribution.
double var_factor(Innovation dist, double nu, double alpha);
double es_factor(Innovation dist, double nu, double alpha);

// Confidence level of the VaR that coincides with the alpha-ES under
// variance-one t innovations: t_nu(ES * sqrt(nu/(nu-2))).
double alpha_star(double nu, double alpha);
double alpha_star_normal(double alpha);

enum class Zone { Green, Yellow, Red };
std::string to_string(Zone z);

// Basel traffic light for 250 one-day forecasts. alpha = 0.99: green <= 4,
// yellow 5-9, red >= 10. alpha = 0.975: green <= 10, yellow 11-17, red >= 18.
// Other horizons or levels throw InvalidConfiguration.
Zone traffic_light(std::size_t pot, double alpha, std::size_t horizon);

// What a one-step-ahead forecast needs from an in-sample fit.
struct ForecastState {
  double mean = 0.0;       // r bar
  double v_last = 1.0;     // v_hat(tau_n)
  double xi_last = 0.0;    // standardized return at n
  double h_last = 1.0;     // conditional variance at n
  semigarch::GarchParams garch;

  static ForecastState from_fit(const semigarch::SemiGarchFit& fit);
};

struct RiskForecast {
  std::size_t horizon = 0;
  double alpha = 0.0;
  std::vector<double> h_path;
  std::vector<double> var_path;
  std::vector<double> es_path;
  std::vector<double> losses;     // -r_{n+k}
  std::size_t pot_var = 0;
  std::size_t pot_es = 0;
  std::optional<Zone> zone;       // from pot_var, when the traffic light applies
};

// Rolling one-day VaR and ES with the scale held at v_hat(tau_n). Each
// h_{n+k} uses information up to n+k-1.
RiskForecast rolling_forecast(const ForecastState& state, std::span<const double> future_returns,
                              double alpha);

}  // namespace psgarch::risk
