#pragma once

#include "psgarch/ipi.hpp"
#include "psgarch/semigarch.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace psgarch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

struct RunConfig {
  std::string input_path;
  std::string date_col;          // optional
  std::string price_col;         // exactly one of price_col, return_col
  std::string return_col;
  std::string series_col;        // smooth only
  ipi::IpiConfig ipi;
  semigarch::Innovation dist = semigarch::Innovation::Normal;
  std::optional<double> nu;
  std::vector<double> alphas{0.99, 0.975};
  std::size_t horizon = 250;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  unsigned threads = 1;

  // simulate
  std::size_t sim_n = 2000;
  std::size_t replications = 100;
  std::string scale = "sine";
  double amplitude = 0.8;
  double garch_alpha = 0.08;
  double garch_beta = 0.87;
  std::vector<int> knot_grid{10, 20, 30, 40, 50, 60, 70};
  std::string scale_csv;
};

// Entry point of the psgarch tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_smooth(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_forecast(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);

}  // namespace psgarch::cli
