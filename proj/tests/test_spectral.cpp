#include "series.hpp"
#include "oracle.hpp"
#include "psgarch/errors.hpp"
#include "psgarch/spectral.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace psgarch;
using namespace psgarch::spectral;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

AcfEstimate forced(std::vector<double> gamma, std::size_t n = 1000) {
  AcfEstimate a;
  a.gamma = std::move(gamma);
  a.n = n;
  return a;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("autocovariance by hand") {
  const std::vector<double> x{1, -1, 1, -1};
  const auto a = autocovariance(x, 2);
  REQUIRE(a.gamma.size() == 3);
  CHECK(a.gamma[0] == doctest::Approx(1.0));
  CHECK(a.gamma[1] == doctest::Approx(-0.75));
  CHECK(a.gamma[2] == doctest::Approx(0.5));
  CHECK(a.max_lag() == 2);
}

TEST_CASE("lag zero is the divisor-n variance") {
  const auto x = testgen::ar1(777, 0.4, 3);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size();
  CHECK(autocovariance(x, 5).gamma[0] == doctest::Approx(var).epsilon(1e-13));
  // Without mean removal the raw second moments are used.
  const auto raw = autocovariance(x, 1, false);
  double ss = 0.0;
  for (double v : x) ss += v * v;
  CHECK(raw.gamma[0] == doctest::Approx(ss / x.size()).epsilon(1e-13));
}

TEST_CASE("white-noise autocovariances are small") {
  const auto x = testgen::white(10000, 11);
  CHECK(std::fabs(autocovariance(x, 5).gamma[5]) < 0.05);
}

TEST_CASE("autocovariance preconditions") {
  CHECK_THROWS_AS(autocovariance(std::vector<double>(10, 2.5), 3), DegenerateInput);
  CHECK_THROWS_AS(autocovariance(std::vector<double>{1, 2, 3}, 3), InvalidInput);
  CHECK_THROWS_AS(autocovariance(std::vector<double>{1, NAN, 3}, 1), InvalidInput);
}

TEST_CASE("lag-window value by hand") {
  const auto a = forced({1.0, 0.5});
  CHECK(lag_window_cf(a, 1) == doctest::Approx((4.0 / 3.0) / kTwoPi).epsilon(1e-14));
  const auto w = forced({2.5, 0.0, 0.0, 0.0});
  for (std::size_t m = 1; m <= 3; ++m) CHECK(lag_window_cf(w, m) == doctest::Approx(2.5 / kTwoPi));
  CHECK_THROWS_AS(lag_window_cf(a, 0), InvalidInput);
  CHECK_THROWS_AS(lag_window_cf(a, 2), InvalidInput);
}

TEST_CASE("lag-window estimate is linear in the autocovariances") {
  const auto a = forced({1.0, 0.3, -0.2, 0.1});
  const auto b = forced({0.5, -0.1, 0.05, 0.2});
  const auto ab = forced({1.0 * 2 + 0.5 * 3, 0.3 * 2 - 0.1 * 3, -0.2 * 2 + 0.05 * 3, 0.1 * 2 + 0.2 * 3});
  CHECK(lag_window_cf(ab, 3) == doctest::Approx(2 * lag_window_cf(a, 3) + 3 * lag_window_cf(b, 3)));
}

TEST_CASE("lag-window estimate on AR(1)") {
  const double phi = 0.5;
  const std::size_t n = 20000;
  const auto x = testgen::ar1(n, phi, 7);
  const auto m = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
  const double truth = 1.0 / (kTwoPi * (1.0 - phi) * (1.0 - phi));
  CHECK(std::fabs(lag_window_cf(autocovariance(x, m), m) / truth - 1.0) < 0.15);
}

TEST_CASE("spectral density and derivative") {
  const auto w = forced({1.0, 0.0, 0.0, 0.0, 0.0});
  for (double om : {0.0, 0.7, 2.0, std::numbers::pi}) {
    CHECK(spectral_density(w, 4, om) == doctest::Approx(1.0 / kTwoPi));
    CHECK(generalized_derivative(w, 4, om) == doctest::Approx(0.0));
  }
  const auto a = forced({1.0, 0.4, 0.1, -0.05});
  CHECK(spectral_density(a, 3, 0.0) == doctest::Approx(lag_window_cf(a, 3)).epsilon(1e-14));
  CHECK(spectral_density(a, 3, 1.1) == doctest::Approx(spectral_density(a, 3, -1.1)).epsilon(1e-14));
  // f1(0) = (1/pi) sum_{l>=1} l gamma(l)
  CHECK(generalized_derivative(a, 3, 0.0) ==
        doctest::Approx((0.4 + 2 * 0.1 - 3 * 0.05) / std::numbers::pi).epsilon(1e-14));
  const auto ints = generalized_derivative_integrals(a, 3);
  CHECK(ints.f1_at_zero == doctest::Approx(generalized_derivative(a, 3, 0.0)));
  // Parseval for the lag-window spectrum: int f^2 = (1/2pi) sum w_l^2 gamma_l^2.
  double parseval = 1.0;
  for (int l = 1; l <= 3; ++l) {
    const double wl = 1.0 - l / 3.5;
    parseval += 2.0 * wl * wl * a.gamma[l] * a.gamma[l];
  }
  CHECK(ints.int_f2 == doctest::Approx(parseval / kTwoPi).epsilon(1e-3));
  double d = 0.0;
  for (int l = 1; l <= 3; ++l) d += 2.0 * l * l * a.gamma[l] * a.gamma[l];
  CHECK(ints.int_f1_sq == doctest::Approx(d / kTwoPi).epsilon(1e-3));
}

TEST_CASE("derivative at zero on AR(1)") {
  const double phi = 0.5;
  const std::size_t n = 20000, m = 27;
  double truth = 0.0;
  for (std::size_t l = 1; l <= m; ++l) truth += 2.0 * l * oracle::ar1_gamma(phi, l);
  truth /= kTwoPi;
  // A single draw is noisy at this width; the median over replications is not.
  std::vector<double> ratio;
  for (std::uint64_t s = 0; s < 21; ++s) {
    const auto a = autocovariance(testgen::ar1(n, phi, 300 + s), m);
    ratio.push_back(generalized_derivative(a, m, 0.0) / truth);
  }
  CHECK(std::fabs(median(ratio) - 1.0) < 0.25);
}

TEST_CASE("select_cf recovers white noise and AR(1) levels") {
  std::vector<double> wn, ar;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto e = select_cf(testgen::white(5000, 100 + s, 1.5));
    CHECK(e.c_f > 0.0);
    CHECK(e.window_width >= 1);
    CHECK(e.window_width <= 2500);
    CHECK(e.iterations <= kMaxGlobalIterations);
    wn.push_back(e.c_f / (2.25 / kTwoPi));
    ar.push_back(select_cf(testgen::ar1(5000, 0.5, 200 + s)).c_f / (1.0 / (kTwoPi * 0.25)));
  }
  CHECK(std::fabs(median(wn) - 1.0) < 0.20);
  CHECK(std::fabs(median(ar) - 1.0) < 0.25);
}

TEST_CASE("selected width barely depends on the starting width") {
  const auto x = testgen::ar1(5000, 0.5, 33);
  const auto a = select_cf(x, {5000 / 4});
  const auto b = select_cf(x, {5000 / 2});
  if (a.converged && b.converged) {
    CHECK(std::max(a.window_width, b.window_width) - std::min(a.window_width, b.window_width) <= 1);
  }
  CHECK(select_cf(x).window_width == b.window_width);
}

TEST_CASE("select_cf preconditions") {
  CHECK_THROWS_AS(select_cf(std::vector<double>(19, 1.0)), InvalidInput);
  CHECK_THROWS_AS(select_cf(std::vector<double>(100, 1.0)), DegenerateInput);
}

}  // TEST_SUITE
