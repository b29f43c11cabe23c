#pragma once

#include "psgarch/pspline.hpp"
#include "psgarch/spectral.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace psgarch::ipi {

struct IpiConfig {
  int p = 3;
  std::optional<int> knots;      // default min(floor(n/4), 40)
  double lambda0 = 0.2;
  int max_iter = 20;
  std::optional<double> tol;     // default 1/n
  bool squared_norm_denominator = false;
  double pinv_tol = pspline::kGramPinvTol;

  int knots_for(std::size_t n) const;
  double tol_for(std::size_t n) const;
};

struct IterationRecord {
  double lambda_in = 0.0;    // penalty used for the fit
  double lambda_out = 0.0;   // updated penalty
  double c_f = 0.0;
  std::size_t window_width = 0;
  double kqa = 0.0;          // K_{q,A} at lambda_out
};

struct IpiResult {
  double lambda_hat = 0.0;
  int iterations = 0;
  bool converged = false;
  pspline::SmootherFit fit;
  spectral::SpectralEstimate spectral;
  // K_{q,A} for lambda0 followed by every updated lambda.
  std::vector<double> kqa_trace;
  std::vector<IterationRecord> log;
  bool cf_floor_hit = false;
  bool large_knot_regime = true;  // every kqa_trace entry > 1
};

// Iterative plug-in selection of the P-spline penalty for y = m(tau) + zeta
// with stationary, possibly correlated, errors.
IpiResult select_lambda(std::span<const double> y, const IpiConfig& config = {});

// Same, reusing a prebuilt basis (its n, p and K take precedence over config).
IpiResult select_lambda(const pspline::SplineBasis& basis, std::span<const double> y,
                        const IpiConfig& config = {});

}  // namespace psgarch::ipi
