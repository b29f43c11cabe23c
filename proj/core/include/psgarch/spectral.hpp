#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace psgarch::spectral {

inline constexpr double kCfFloor = 1e-10;
inline constexpr int kGridPoints = 512;
inline constexpr int kMaxGlobalIterations = 20;

// Sample autocovariances with divisor n: gamma[l] for l = 0..max_lag.
struct AcfEstimate {
  std::vector<double> gamma;
  std::size_t n = 0;
  bool mean_removed = true;

  std::size_t max_lag() const { return gamma.empty() ? 0 : gamma.size() - 1; }
};

// Throws DegenerateInput for a constant series and InvalidInput when
// max_lag >= n.
AcfEstimate autocovariance(std::span<const double> x, std::size_t max_lag, bool remove_mean = true);

// Bartlett lag-window estimate of f(0):
//   (1/2pi) sum_{|l|<=m} (1 - |l|/(m+0.5)) gamma(|l|)
double lag_window_cf(const AcfEstimate& acf, std::size_t m);

// Lag-window spectral density at frequency omega.
double spectral_density(const AcfEstimate& acf, std::size_t m, double omega);

// First generalized derivative (characteristic exponent 1):
//   (1/2pi) sum_{|l|<=m} |l| gamma(|l|) cos(l omega)
double generalized_derivative(const AcfEstimate& acf, std::size_t m, double omega);

struct SpectralIntegrals {
  double int_f2 = 0.0;       // integral of f^2 over [-pi, pi]
  double int_f1_sq = 0.0;    // integral of (f^(1))^2 over [-pi, pi]
  double f1_at_zero = 0.0;   // f^(1)(0)
};

// Trapezoid rule on kGridPoints equispaced frequencies of [0, pi], doubled
// by symmetry.
SpectralIntegrals generalized_derivative_integrals(const AcfEstimate& acf, std::size_t m);

struct SpectralEstimate {
  double c_f = 0.0;
  std::size_t window_width = 0;
  std::size_t global_width = 0;
  int iterations = 0;          // global-stage iterations
  bool converged = false;      // global stage settled within one lag
  bool derivative_fallback = false;  // f^(1)(0) vanished, width set to [n^{1/3}]
  bool floor_applied = false;        // c_f clipped at kCfFloor
};

struct SelectOptions {
  // Starting window width of the global stage; [n/2] when unset.
  std::optional<std::size_t> initial_width;
};

// Data-driven Bartlett lag-window estimate of c_f = f(0) with the window
// width chosen by an iterative plug-in (global stage, then local adaptation
// at frequency zero). Requires n >= 20.
SpectralEstimate select_cf(std::span<const double> x, const SelectOptions& options = {});

}  // namespace psgarch::spectral
