#pragma once

#include "psgarch_cli/csv.hpp"

#include <string>
#include <vector>

namespace testgen {

inline std::string data_path(const std::string& name) {
  return std::string(PSGARCH_TEST_DATA) + "/" + name;
}

// sin(2 pi tau) + AR(1) (phi = 0.3, sd 0.2), n = 2000.
inline std::vector<double> sine_fixture() {
  return psgarch::cli::numeric_column(psgarch::cli::read_csv(data_path("sine_ar1.csv")), "y");
}

}  // namespace testgen
