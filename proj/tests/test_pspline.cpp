#include "oracle.hpp"
#include "psgarch/errors.hpp"
#include "psgarch/pspline.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

using namespace psgarch;
using namespace psgarch::pspline;

namespace {

std::vector<double> sine(std::size_t n, double shift = 0.0) {
  std::vector<double> m(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double tau = (t + 0.5) / static_cast<double>(n);
    m[t] = std::sin(2.0 * std::numbers::pi * tau + shift) + 0.3 * tau;
  }
  return m;
}

std::vector<oracle::Real> widen(const std::vector<double>& x) {
  return {x.begin(), x.end()};
}

double max_rel(const std::vector<double>& a, const std::vector<oracle::Real>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, static_cast<double>(std::fabs(a[i] - b[i])));
    den = std::max(den, static_cast<double>(std::fabs(b[i])));
  }
  return num / std::max(den, 1e-300);
}

std::vector<double> polynomial(const SplineBasis& b, const std::vector<double>& coef) {
  std::vector<double> y(b.n());
  for (std::size_t t = 0; t < b.n(); ++t) {
    double pw = 1.0, s = 0.0;
    for (double c : coef) {
      s += c * pw;
      pw *= b.tau()[t];
    }
    y[t] = s;
  }
  return y;
}

}  // namespace

TEST_SUITE("pspline") {

TEST_CASE("basis layout") {
  const auto b = build_basis(10, 1, 2);
  CHECK(b.dim() == 4);
  CHECK(b.design().rows() == 10);
  CHECK(b.design().cols() == 4);
  CHECK(b.knots()[0] == doctest::Approx(1.0 / 3.0));
  CHECK(b.knots()[1] == doctest::Approx(2.0 / 3.0));
  CHECK(b.tau().front() == doctest::Approx(0.05));
  for (std::size_t t = 1; t < 10; ++t) CHECK(b.tau()[t] > b.tau()[t - 1]);
  CHECK(b.penalty_mask() == std::vector<double>{0, 0, 1, 1});
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(b.design()(t, 0) == 1.0);
    CHECK(b.design()(t, 1) == doctest::Approx(b.tau()[t]));
    CHECK(b.design()(t, 3) == doctest::Approx(std::max(0.0, b.tau()[t] - 2.0 / 3.0)));
  }
  CHECK(b.design()(0, 3) == 0.0);
}

TEST_CASE("default-size basis") {
  const auto b = build_basis(7641, 3, 40);
  CHECK(b.design().rows() == 7641);
  CHECK(b.design().cols() == 44);
  double ones = 0;
  for (double v : b.penalty_mask()) ones += v;
  CHECK(ones == 40);
  CHECK(b.rank() == 44);
}

TEST_CASE("basis preconditions") {
  CHECK_THROWS_AS(build_basis(7, 1, 2), InvalidConfiguration);
  CHECK_THROWS_AS(build_basis(100, 0, 2), InvalidConfiguration);
  CHECK_THROWS_AS(build_basis(100, 3, 0), InvalidConfiguration);
  CHECK_THROWS_AS(build_basis(100, 3, 5, 0.0), InvalidConfiguration);
  CHECK_NOTHROW(build_basis(8, 1, 2));
}

TEST_CASE("gram_pinv is the generalized inverse of TᵀT") {
  const auto b = build_basis(200, 3, 10);
  oracle::Real margin = 0.0L;
  const auto ref = oracle::sym_pinv(oracle::mul(oracle::transpose(oracle::design(200, 3, 10)),
                                                oracle::design(200, 3, 10)),
                                    b.pinv_tol(), &margin);
  REQUIRE(margin > std::log(1.5));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) {
      num = std::max(num, static_cast<double>(std::fabs(b.gram_pinv()(i, j) - ref[i][j])));
      den = std::max(den, static_cast<double>(std::fabs(ref[i][j])));
    }
  CHECK(num / den < 1e-9);
  // Penrose: G P G = G on the retained subspace when nothing is truncated.
  const auto full = build_basis(40, 1, 2);
  const auto gf = linalg::matmul(linalg::transpose(full.design()), full.design());
  const auto gpg = linalg::matmul(linalg::matmul(gf, full.gram_pinv()), gf);
  CHECK(linalg::frobenius(linalg::subtract(gpg, gf)) < 1e-9 * linalg::frobenius(gf));
}

TEST_CASE("fit reproduces polynomials for any lambda") {
  for (int p = 1; p <= 3; ++p) {
    const auto b = build_basis(120, p, 9);
    std::vector<double> coef;
    for (int j = 0; j <= p; ++j) coef.push_back(1.5 - 0.7 * j);
    const auto y = polynomial(b, coef);
    for (double lambda : {0.0, 1e-3, 0.2, 5.0, 1e3}) {
      const auto f = fit(b, y, lambda);
      for (std::size_t t = 0; t < y.size(); ++t) CHECK(std::fabs(f.fitted[t] - y[t]) < 1e-8);
    }
  }
}

TEST_CASE("lambda = 0 reproduces any y in the span of T") {
  const auto b = build_basis(60, 3, 6);
  std::vector<double> theta(b.dim());
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = std::cos(1.0 + j);
  const auto y = linalg::mat_vec(b.design(), theta);
  const auto f = fit(b, y, 0.0);
  for (std::size_t t = 0; t < y.size(); ++t) CHECK(std::fabs(f.fitted[t] - y[t]) < 1e-8);
}

TEST_CASE("fit matches the dense formula") {
  std::mt19937_64 g(21);
  std::normal_distribution<double> z;
  std::vector<double> y(50);
  for (auto& v : y) v = z(g);
  const auto b = build_basis(50, 2, 5);
  const auto f = fit(b, y, 0.5);
  const auto ref = oracle::smoother(50, 2, 5, 0.5L, widen(y));
  CHECK(max_rel(f.fitted, ref.fitted) < 1e-10);
  for (std::size_t t = 0; t < y.size(); ++t) CHECK(f.fitted[t] + f.residuals[t] == doctest::Approx(y[t]).epsilon(1e-15));
  CHECK(f.trace_s == doctest::Approx(static_cast<double>(oracle::trace(ref.s))).epsilon(1e-10));
  CHECK(f.trace_s2 ==
        doctest::Approx(static_cast<double>(oracle::trace(oracle::mul(ref.s, ref.s)))).epsilon(1e-10));
  CHECK(f.trace_s <= static_cast<double>(b.dim()) + 1e-12);
  CHECK(f.trace_s2 >= 0.0);
}

TEST_CASE("bias component") {
  const auto b = build_basis(40, 3, 8);
  CHECK(bias_component(b, polynomial(b, {1, -2, 0.5, 3}), 1.0) < 1e-12);
  CHECK(bias_component(b, std::vector<double>(40, 0.0), 1.0) == 0.0);
  const auto m = sine(40);
  const auto ref = oracle::smoother(40, 3, 8, 1.0L, widen(m));
  CHECK(bias_component(b, m, 1.0) ==
        doctest::Approx(static_cast<double>(oracle::bias(ref.s, widen(m)))).epsilon(1e-9));
}

TEST_CASE("variance component") {
  const auto b = build_basis(40, 3, 8);
  CHECK_THROWS_AS(variance_component(b, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(variance_component(b, 1.0, -1.0), InvalidInput);
  const double v1 = variance_component(b, 1.0, 0.3);
  CHECK(variance_component(b, 1.0, 0.6) == doctest::Approx(2.0 * v1).epsilon(1e-14));
  const auto ref = oracle::smoother(40, 3, 8, 1.0L, std::vector<oracle::Real>(40, 0.0L));
  const double expect = static_cast<double>(oracle::trace(oracle::mul(ref.s, ref.s)) / 40.0L);
  CHECK(variance_component(b, 1.0, 1.0 / (2.0 * std::numbers::pi)) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("compact traces agree with the assembled smoother") {
  const auto b = build_basis(300, 3, 20);
  for (double lambda : {0.05, 0.2, 1.0}) {
    const auto s = smoother_matrix(b, lambda);
    const auto f = fit(b, sine(300), lambda);
    CHECK(f.trace_s == doctest::Approx(linalg::trace(s)).epsilon(1e-10));
    CHECK(f.trace_s2 == doctest::Approx(linalg::trace(linalg::matmul(s, s))).epsilon(1e-10));
    CHECK(linalg::frobenius(linalg::subtract(s, linalg::transpose(s))) < 1e-10);
  }
  CHECK_THROWS_AS(smoother_matrix(build_basis(5001, 1, 2), 1.0), InvalidInput);
}

TEST_CASE("effective dimension shrinks as lambda grows") {
  const auto b = build_basis(200, 3, 15);
  const auto y = sine(200);
  double prev = fit(b, y, 0.0).trace_s;
  CHECK(prev == doctest::Approx(static_cast<double>(b.dim())).epsilon(1e-9));
  for (int i = 1; i <= 50; ++i) {
    const double tr = fit(b, y, 0.1 * i).trace_s;
    CHECK(tr <= prev + 1e-9);
    prev = tr;
  }
}

TEST_CASE("very large lambda gives the polynomial regression fit") {
  const auto b = build_basis(150, 3, 12);
  const auto y = sine(150);
  const auto f = fit(b, y, 1e6);
  const auto poly = build_basis(150, 3, 1);
  // Regression on the polynomial columns only.
  linalg::Matrix x(150, 4);
  for (std::size_t t = 0; t < 150; ++t)
    for (std::size_t j = 0; j < 4; ++j) x(t, j) = poly.design()(t, j);
  const auto beta = linalg::mat_vec(linalg::pseudo_inverse(x), y);
  const auto ls = linalg::mat_vec(x, beta);
  for (std::size_t t = 0; t < 150; ++t) CHECK(std::fabs(f.fitted[t] - ls[t]) < 1e-4);
}

TEST_CASE("adding a constant shifts the fit by the constant") {
  const auto b = build_basis(100, 2, 10);
  auto y = sine(100);
  const auto f1 = fit(b, y, 0.3);
  for (auto& v : y) v += 7.5;
  const auto f2 = fit(b, y, 0.3);
  for (std::size_t t = 0; t < 100; ++t) CHECK(f2.fitted[t] == doctest::Approx(f1.fitted[t] + 7.5).epsilon(1e-12));
}

TEST_CASE("fit rejects bad input") {
  const auto b = build_basis(40, 1, 3);
  std::vector<double> y(40, 1.0);
  CHECK_THROWS_AS(fit(b, std::vector<double>(39, 1.0), 0.2), InvalidInput);
  CHECK_THROWS_AS(fit(b, y, -1.0), InvalidInput);
  y[3] = std::nan("");
  CHECK_THROWS_AS(fit(b, y, 0.2), InvalidInput);
}

TEST_CASE("lambda_a with a vanishing pilot does not depend on c_f") {
  const auto b = build_basis(200, 3, 10);
  const std::vector<double> zero(200, 0.0);
  const auto terms = lambda_a_terms(b, zero);
  CHECK(terms.curvature == 0.0);
  const double expect = std::pow(terms.trace_pd / terms.trace_pd_sq, 1.0 / 6.0);
  CHECK(lambda_a(b, zero, 0.2) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(lambda_a(b, zero, 0.8) == doctest::Approx(lambda_a(b, zero, 0.2)).epsilon(1e-13));
  CHECK_THROWS_AS(lambda_a(b, zero, 0.0), InvalidInput);
}

TEST_CASE("lambda_a matches the dense formula") {
  const std::size_t n = 200;
  const auto b = build_basis(n, 3, 10);
  const auto m_hat = fit(b, sine(n), 0.2).fitted;
  for (bool squared : {false, true}) {
    oracle::Real margin = 0.0L;
    const auto ref = oracle::lambda_a(n, 3, 10, widen(m_hat), 0.2L, b.pinv_tol(), squared, &margin);
    REQUIRE(margin > std::log(1.5));
    CHECK(lambda_a(b, m_hat, 0.2, {squared}) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-9));
  }
}

TEST_CASE("lambda_a with the tighter generalized-inverse cutoff") {
  const std::size_t n = 60;
  const auto b = build_basis(n, 2, 6, 1e-12);
  const auto m_hat = fit(b, sine(n), 0.2).fitted;
  oracle::Real margin = 0.0L;
  const auto ref = oracle::lambda_a(n, 2, 6, widen(m_hat), 0.05L, 1e-12L, false, &margin);
  REQUIRE(margin > std::log(1.5));
  CHECK(lambda_a(b, m_hat, 0.05) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-7));
}

TEST_CASE("kqa") {
  CHECK(kqa(40, 0.05, 3, 7660) == doctest::Approx(4.344).epsilon(0.001 / 4.344));
  // lambda* pi^{2q} = n collapses the formula to K.
  const int p = 3;
  const double n = 5000.0;
  const double lambda = std::pow(n / std::pow(std::numbers::pi, 2.0 * (p + 1)), 1.0 / (2.0 * p));
  CHECK(kqa(17, lambda, p, 5000) == doctest::Approx(17.0).epsilon(1e-12));
  CHECK(kqa(40, 0.2, 3, 7641) > 1.0);
  CHECK_THROWS_AS(kqa(0, 0.2, 3, 100), InvalidInput);
  CHECK_THROWS_AS(kqa(10, 0.0, 3, 100), InvalidInput);
}

TEST_CASE("concurrent fits on one basis agree") {
  const auto b = build_basis(500, 3, 20);
  const auto y = sine(500);
  const auto ref = fit(b, y, 0.2);
  std::vector<SmootherFit> out(4);
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < 4; ++i) pool.emplace_back([&, i] { out[i] = fit(b, y, 0.2); });
  }
  for (const auto& f : out) CHECK(f.fitted == ref.fitted);
}

}  // TEST_SUITE
