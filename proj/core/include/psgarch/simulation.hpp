#pragma once

#include "psgarch/ipi.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace psgarch::sim {

struct SimDesign {
  std::function<double(double)> scale_fn;   // v(tau) > 0 on [0, 1]
  double alpha1 = 0.08;
  double beta1 = 0.87;
  std::size_t n = 2000;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  std::vector<int> knot_grid{10, 20, 30, 40, 50, 60, 70};
  ipi::IpiConfig ipi;
  unsigned threads = 1;

  void validate() const;
};

// v(tau) = (1 + amplitude sin(2 pi tau))^2; requires |amplitude| < 1.
std::function<double(double)> sine_scale(double amplitude);
std::function<double(double)> constant_scale(double v);
// Piecewise-linear interpolation of v over an increasing tau grid.
std::function<double(double)> tabulated_scale(std::vector<double> tau, std::vector<double> v);

struct SimulatedPath {
  std::vector<double> returns;
  std::vector<double> sigma;   // true sqrt(v(tau_t) h_t)
};

// Replication j of the design. Depends only on (design, j).
SimulatedPath simulate(const SimDesign& design, std::size_t replication);

// Mean over replications of the average absolute error.
double maae(const std::vector<std::vector<double>>& estimates,
            const std::vector<std::vector<double>>& truths);
// (1 - m_x / m_cs) * 100.
double rmaae(double m_x, double m_cs);

struct MethodRow {
  std::string method;        // "CS" or "PC"
  int knots = 0;             // 0 for CS
  double maae = 0.0;
  double rmaae = 0.0;
  double mean_lambda = 0.0;  // NaN-free; 0 for CS
  std::vector<double> aae;   // per successful replication
};

struct SimReport {
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t failures = 0;
  std::uint64_t seed = 0;
  double m_cs = 0.0;
  std::vector<MethodRow> rows;   // CS first, then PC per knot count
};

SimReport run_study(const SimDesign& design);

}  // namespace psgarch::sim
