#pragma once

#include "psgarch/errors.hpp"
#include "psgarch/ipi.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psgarch::semigarch {

struct ReturnSeries {
  std::vector<double> returns;
  double mean = 0.0;
  std::vector<double> centered;   // returns - mean
  std::vector<double> tau;        // (t - 0.5) / n
};

// Log returns ln P_t - ln P_{t-1}. Throws InvalidInput for non-positive or
// non-finite prices or fewer than two prices.
ReturnSeries to_returns(std::span<const double> prices);
ReturnSeries from_returns(std::span<const double> returns);

// y_t = ln(r*_t^2). Exact zeros are replaced by the smallest non-zero |r*_t|
// of the sample; the number of replacements goes to `replaced`. Throws
// DegenerateInput if every centered return is zero.
std::vector<double> log_transform(const ReturnSeries& rs, std::size_t* replaced = nullptr);

struct ScaleFit {
  std::vector<double> m_hat;     // fitted log-scale trend
  double c_eps = 0.0;
  std::vector<double> v_hat;     // c_eps * exp(m_hat)
  double lambda_hat = 0.0;
  ipi::IpiResult ipi;
  std::size_t zero_replacements = 0;
};

ScaleFit estimate_scale(const ReturnSeries& rs, const ipi::IpiConfig& config = {});
ScaleFit estimate_scale(const pspline::SplineBasis& basis, const ReturnSeries& rs,
                        const ipi::IpiConfig& config = {});

enum class Innovation { Normal, StudentT };

std::string to_string(Innovation d);
Innovation innovation_from_string(const std::string& name);

// Unit-variance GARCH(1,1): h_t = alpha0 + alpha1 xi_{t-1}^2 + beta1 h_{t-1}
// with alpha0 = 1 - alpha1 - beta1.
struct GarchParams {
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double alpha0 = 1.0;
  Innovation dist = Innovation::Normal;
  double nu = 0.0;       // degrees of freedom for StudentT, > 4
  double loglik = 0.0;

  static GarchParams make(double alpha1, double beta1, Innovation dist = Innovation::Normal,
                          double nu = 0.0);
};

// Thrown when the likelihood optimizer does not settle; carries the best
// point found.
class GarchFitFailure : public NumericFailure {
 public:
  GarchFitFailure(const std::string& what, GarchParams best)
      : NumericFailure(what), best_(best) {}
  const GarchParams& best() const { return best_; }

 private:
  GarchParams best_;
};

struct GarchFitOptions {
  std::optional<double> fixed_nu;   // estimate nu when unset (StudentT only)
};

// h_1 = h_init, then the GARCH recursion.
std::vector<double> garch_filter(const GarchParams& params, std::span<const double> xi,
                                 double h_init = 1.0);

// Conditional log-likelihood of xi given the parameters (h_1 = 1). StudentT
// uses the variance-one rescaled t density.
double garch_loglik(const GarchParams& params, std::span<const double> xi);

// Quasi maximum likelihood for the unit GARCH(1,1). Requires n >= 250 and a
// mean square of xi within 10% of one.
GarchParams fit_unit_garch(std::span<const double> xi, Innovation dist = Innovation::Normal,
                           const GarchFitOptions& options = {});

struct SemiGarchFit {
  ReturnSeries returns;
  ScaleFit scale;
  GarchParams garch;
  std::vector<double> xi;           // r*_t / sqrt(v_hat)
  std::vector<double> h;
  std::vector<double> sigma_total;  // sqrt(v_hat h)
};

SemiGarchFit fit_semigarch(const ReturnSeries& rs, const ipi::IpiConfig& config = {},
                           Innovation dist = Innovation::Normal,
                           const GarchFitOptions& options = {});
SemiGarchFit fit_semigarch(const pspline::SplineBasis& basis, const ReturnSeries& rs,
                           const ipi::IpiConfig& config = {},
                           Innovation dist = Innovation::Normal,
                           const GarchFitOptions& options = {});

}  // namespace psgarch::semigarch
