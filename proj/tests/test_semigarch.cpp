#include "series.hpp"
#include "psgarch/errors.hpp"
#include "psgarch/semigarch.hpp"
#include "psgarch/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <numbers>
#include <algorithm>

using namespace psgarch;
using namespace psgarch::semigarch;

namespace {

std::vector<double> garch_xi(double a1, double b1, std::size_t n, std::uint64_t seed) {
  const auto z = testgen::white(n, seed);
  std::vector<double> xi(n);
  double h = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) h = (1.0 - a1 - b1) + a1 * xi[t - 1] * xi[t - 1] + b1 * h;
    xi[t] = std::sqrt(h) * z[t];
  }
  return xi;
}

double mean_square(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / x.size();
}

}  // namespace

TEST_SUITE("semigarch") {

TEST_CASE("returns from prices") {
  const auto rs = to_returns(std::vector<double>{100.0, 100.0 * std::exp(0.01)});
  REQUIRE(rs.returns.size() == 1);
  CHECK(rs.returns[0] == doctest::Approx(0.01).epsilon(1e-12));
  const auto r2 = to_returns(std::vector<double>{1, 2, 4});
  CHECK(r2.centered[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(r2.centered[1] == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(log_transform(r2), DegenerateInput);
  CHECK_THROWS_AS(to_returns(std::vector<double>{1, 0, 2}), InvalidInput);
  CHECK_THROWS_AS(to_returns(std::vector<double>{1}), InvalidInput);
  CHECK_THROWS_AS(log_transform(to_returns(std::vector<double>(10, 3.0))), DegenerateInput);
}

TEST_CASE("centered returns sum to zero") {
  const auto r = testgen::ar1(3001, 0.1, 4, 0.01);
  const auto rs = from_returns(r);
  CHECK(rs.tau.size() == r.size());
  CHECK(rs.tau.front() == doctest::Approx(0.5 / 3001));
  const double s = std::accumulate(rs.centered.begin(), rs.centered.end(), 0.0);
  CHECK(std::fabs(s) < 1e-10 * r.size());
}

TEST_CASE("log transform") {
  ReturnSeries rs;
  rs.centered = {std::exp(1.0), -std::exp(1.0), 0.02};
  const auto y = log_transform(rs);
  CHECK(y[0] == doctest::Approx(2.0));
  CHECK(y[1] == doctest::Approx(2.0));
  CHECK(y[2] == doctest::Approx(-7.824046).epsilon(1e-6));

  ReturnSeries z;
  z.centered = {0.5, 0.0, -0.1, 0.0};
  std::size_t replaced = 0;
  const auto yz = log_transform(z, &replaced);
  CHECK(replaced == 2);
  CHECK(yz[1] == doctest::Approx(2.0 * std::log(0.1)));
  for (double v : yz) CHECK(std::isfinite(v));
}

TEST_CASE("garch filter recursion") {
  const auto p = GarchParams::make(0.08, 0.87);
  CHECK(p.alpha0 == doctest::Approx(0.05));
  const auto h = garch_filter(p, std::vector<double>{2.0, 0.0, 1.0});
  CHECK(h[0] == 1.0);
  CHECK(h[1] == doctest::Approx(1.24));
  CHECK(h[2] == doctest::Approx(1.1288));
  const auto ones = garch_filter(p, std::vector<double>(50, 1.0));
  for (double v : ones) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  const auto flat = garch_filter(GarchParams::make(0.0, 0.0), testgen::white(50, 1));
  for (double v : flat) CHECK(v == 1.0);
  const auto any = garch_filter(p, testgen::white(500, 2));
  for (double v : any) CHECK(v >= p.alpha0);
  CHECK_THROWS_AS(GarchParams::make(0.5, 0.5), InvalidInput);
  CHECK_THROWS_AS(GarchParams::make(-0.1, 0.5), InvalidInput);
  CHECK_THROWS_AS(GarchParams::make(0.1, 0.5, Innovation::StudentT, 4.0), InvalidInput);
}

TEST_CASE("innovation names") {
  CHECK(to_string(Innovation::Normal) == "normal");
  CHECK(innovation_from_string("t") == Innovation::StudentT);
  CHECK_THROWS_AS(innovation_from_string("cauchy"), InvalidConfiguration);
}

TEST_CASE("likelihood") {
  const auto xi = testgen::white(300, 9);
  // alpha1 = beta1 = 0 gives the iid normal likelihood.
  double ll = 0.0;
  for (double v : xi) ll += -0.5 * (std::log(2.0 * std::numbers::pi) + v * v);
  CHECK(garch_loglik(GarchParams::make(0.0, 0.0), xi) == doctest::Approx(ll).epsilon(1e-12));
}

TEST_CASE("GARCH parameters are recovered") {
  double e1 = 0.0, e2 = 0.0;
  const int reps = 8;
  for (int j = 0; j < reps; ++j) {
    auto xi = garch_xi(0.08, 0.87, 7641, 500 + j);
    const double ms = std::sqrt(mean_square(xi));
    for (auto& v : xi) v /= ms;
    const auto g = fit_unit_garch(xi);
    CHECK(g.alpha0 == doctest::Approx(1.0 - g.alpha1 - g.beta1));
    CHECK(g.loglik >= garch_loglik(GarchParams::make(0.1, 0.8), xi));
    e1 += std::fabs(g.alpha1 - 0.08);
    e2 += std::fabs(g.beta1 - 0.87);
  }
  CHECK(e1 / reps < 0.03);
  CHECK(e2 / reps < 0.03);
}

TEST_CASE("no ARCH effect in iid data") {
  std::vector<double> a;
  for (int j = 0; j < 5; ++j) {
    auto xi = testgen::white(3000, 900 + j);
    const double ms = std::sqrt(mean_square(xi));
    for (auto& v : xi) v /= ms;
    a.push_back(fit_unit_garch(xi).alpha1);
  }
  std::sort(a.begin(), a.end());
  CHECK(a[2] < 0.03);
}

TEST_CASE("student-t fit") {
  auto xi = garch_xi(0.08, 0.87, 3000, 77);
  const double ms = std::sqrt(mean_square(xi));
  for (auto& v : xi) v /= ms;
  const auto g = fit_unit_garch(xi, Innovation::StudentT);
  CHECK(g.dist == Innovation::StudentT);
  CHECK(g.nu > 4.0);
  CHECK(g.nu <= 100.0);
  const auto fixed = fit_unit_garch(xi, Innovation::StudentT, {8.0});
  CHECK(fixed.nu == 8.0);
  CHECK_THROWS_AS(fit_unit_garch(xi, Innovation::StudentT, {3.0}), InvalidInput);
}

TEST_CASE("fit preconditions") {
  CHECK_THROWS_AS(fit_unit_garch(testgen::white(100, 1)), InvalidInput);
  auto big = testgen::white(400, 1, 3.0);
  CHECK_THROWS_AS(fit_unit_garch(big), InvalidInput);
}

TEST_CASE("constant scale is recovered") {
  const double c = 0.015;
  const auto r = testgen::white(5000, 41, c);
  const auto sf = estimate_scale(from_returns(r));
  double rel = 0.0;
  for (double v : sf.v_hat) {
    CHECK(v > 0.0);
    rel += std::fabs(v / (c * c) - 1.0);
  }
  CHECK(rel / sf.v_hat.size() < 0.15);
}

// The plug-in penalty stays finite when the trend is flat, so the estimate
// keeps some wiggle near the ends.
TEST_CASE("constant scale is recovered uniformly" * doctest::may_fail()) {
  const double c = 0.015;
  const auto sf = estimate_scale(from_returns(testgen::white(5000, 41, c)));
  double worst = 0.0;
  for (double v : sf.v_hat) worst = std::max(worst, std::fabs(v / (c * c) - 1.0));
  CHECK(worst < 0.15);
}

TEST_CASE("unit mean square after descaling") {
  sim::SimDesign d;
  d.scale_fn = sim::sine_scale(0.5);
  d.n = 5000;
  const auto path = sim::simulate(d, 3);
  const auto rs = from_returns(path.returns);
  const auto f = fit_semigarch(rs);
  CHECK(mean_square(f.xi) == doctest::Approx(1.0).epsilon(1e-8));
  for (std::size_t t = 0; t < f.xi.size(); ++t) {
    CHECK(f.scale.v_hat[t] > 0.0);
    CHECK(f.sigma_total[t] == doctest::Approx(std::sqrt(f.scale.v_hat[t] * f.h[t])).epsilon(1e-13));
  }
  double rel = 0.0;
  for (std::size_t t = 0; t < d.n; ++t) {
    const double v = d.scale_fn((t + 0.5) / d.n);
    rel += std::fabs(f.scale.v_hat[t] / v - 1.0);
  }
  CHECK(rel / d.n < 0.20);
}

TEST_CASE("scale equivariance") {
  sim::SimDesign d;
  d.scale_fn = sim::sine_scale(0.5);
  d.n = 2000;
  const auto r = sim::simulate(d, 1).returns;
  std::vector<double> r2(r);
  const double s = 3.7;
  for (auto& v : r2) v *= s;
  const auto a = fit_semigarch(from_returns(r));
  const auto b = fit_semigarch(from_returns(r2));
  for (std::size_t t = 0; t < r.size(); ++t) {
    CHECK(b.scale.v_hat[t] == doctest::Approx(s * s * a.scale.v_hat[t]).epsilon(1e-8));
    CHECK(b.sigma_total[t] == doctest::Approx(s * a.sigma_total[t]).epsilon(1e-6));
  }
  CHECK(b.garch.alpha1 == doctest::Approx(a.garch.alpha1).epsilon(1e-6));
  CHECK(b.garch.beta1 == doctest::Approx(a.garch.beta1).epsilon(1e-6));
}

}  // TEST_SUITE
