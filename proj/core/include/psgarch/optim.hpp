#pragma once

#include <functional>
#include <vector>

namespace psgarch::optim {

struct NelderMeadOptions {
  int max_evaluations = 4000;
  double ftol = 1e-10;   // relative spread of simplex values
  double xtol = 1e-8;    // simplex diameter
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Unconstrained Nelder-Mead minimization (standard reflection, expansion,
// contraction and shrink coefficients 1, 2, 1/2, 1/2).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step,
                             const NelderMeadOptions& options = {});

}  // namespace psgarch::optim
