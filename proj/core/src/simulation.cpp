#include "psgarch/simulation.hpp"

#include "psgarch/errors.hpp"
#include "psgarch/pspline.hpp"
#include "psgarch/semigarch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

namespace psgarch::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Box-Muller from raw 64-bit draws; std::normal_distribution is not portable
// across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    cached_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform_open() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 eng_;
  bool cached_ = false;
  double spare_ = 0.0;
};

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

struct ReplicationResult {
  bool ok = false;
  double aae_cs = 0.0;
  std::vector<double> aae_pc;
  std::vector<double> lambda_pc;
};

}  // namespace

void SimDesign::validate() const {
  if (!scale_fn) throw InvalidConfiguration("SimDesign: scale function missing");
  if (!(alpha1 >= 0.0) || !(beta1 >= 0.0) || !(alpha1 + beta1 < 1.0)) {
    throw InvalidConfiguration("SimDesign: need alpha1, beta1 >= 0 and alpha1 + beta1 < 1");
  }
  if (n < 250) throw InvalidConfiguration("SimDesign: n must be at least 250");
  if (replications == 0) throw InvalidConfiguration("SimDesign: replications must be positive");
  if (knot_grid.empty()) throw InvalidConfiguration("SimDesign: empty knot grid");
  for (int k : knot_grid) {
    if (k < 1 || n < 2 * static_cast<std::size_t>(ipi.p + 1 + k)) {
      throw InvalidConfiguration("SimDesign: knot count out of range for n");
    }
  }
  for (int i = 0; i <= 100; ++i) {
    const double v = scale_fn(i / 100.0);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidConfiguration("SimDesign: scale function must be positive on [0, 1]");
    }
  }
}

std::function<double(double)> sine_scale(double amplitude) {
  if (!(std::fabs(amplitude) < 1.0)) throw InvalidConfiguration("sine_scale: |amplitude| must be < 1");
  return [amplitude](double tau) {
    const double s = 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * tau);
    return s * s;
  };
}

std::function<double(double)> constant_scale(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidConfiguration("constant_scale: v must be positive");
  return [v](double) { return v; };
}

std::function<double(double)> tabulated_scale(std::vector<double> tau, std::vector<double> v) {
  if (tau.size() != v.size() || tau.size() < 2) {
    throw InvalidConfiguration("tabulated_scale: need at least two matching points");
  }
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i]) || !std::isfinite(tau[i])) {
      throw InvalidConfiguration("tabulated_scale: values must be finite and positive");
    }
    if (i > 0 && !(tau[i] > tau[i - 1])) {
      throw InvalidConfiguration("tabulated_scale: tau must be strictly increasing");
    }
  }
  return [tau = std::move(tau), v = std::move(v)](double t) {
    if (t <= tau.front()) return v.front();
    if (t >= tau.back()) return v.back();
    const auto it = std::upper_bound(tau.begin(), tau.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - tau.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - tau[lo]) / (tau[hi] - tau[lo]);
    return v[lo] + w * (v[hi] - v[lo]);
  };
}

SimulatedPath simulate(const SimDesign& design, std::size_t replication) {
  GaussianStream gauss(splitmix64(design.seed ^ splitmix64(replication + 1)));
  const std::size_t n = design.n;
  const double a0 = 1.0 - design.alpha1 - design.beta1;
  SimulatedPath path;
  path.returns.resize(n);
  path.sigma.resize(n);
  double h = 1.0;
  double xi_prev = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) h = a0 + design.alpha1 * xi_prev * xi_prev + design.beta1 * h;
    const double xi = std::sqrt(h) * gauss.next();
    const double tau = (static_cast<double>(t) + 0.5) / static_cast<double>(n);
    const double sv = std::sqrt(design.scale_fn(tau));
    path.returns[t] = sv * xi;
    path.sigma[t] = sv * std::sqrt(h);
    xi_prev = xi;
  }
  return path;
}

double maae(const std::vector<std::vector<double>>& estimates,
            const std::vector<std::vector<double>>& truths) {
  if (estimates.size() != truths.size() || estimates.empty()) {
    throw InvalidInput("maae: replication counts differ or are zero");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    if (estimates[j].size() != truths[j].size() || estimates[j].empty()) {
      throw InvalidInput("maae: series lengths differ or are zero");
    }
    total += mean_abs_diff(estimates[j], truths[j]);
  }
  return total / static_cast<double>(estimates.size());
}

double rmaae(double m_x, double m_cs) {
  if (!(m_cs > 0.0)) throw InvalidInput("rmaae: m_cs must be positive");
  return (1.0 - m_x / m_cs) * 100.0;
}

SimReport run_study(const SimDesign& design) {
  design.validate();
  const std::size_t kn = design.knot_grid.size();

  std::vector<pspline::SplineBasis> bases;
  bases.reserve(kn);
  for (int k : design.knot_grid) {
    bases.push_back(pspline::build_basis(design.n, design.ipi.p, k, design.ipi.pinv_tol));
  }

  std::vector<ReplicationResult> results(design.replications);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= design.replications) return;
      ReplicationResult res;
      try {
        const SimulatedPath path = simulate(design, j);
        const auto rs = semigarch::from_returns(path.returns);

        double ss = 0.0;
        for (double c : rs.centered) ss += c * c;
        const double sd = std::sqrt(ss / static_cast<double>(design.n));
        std::vector<double> xi(design.n);
        for (std::size_t t = 0; t < design.n; ++t) xi[t] = rs.centered[t] / sd;
        const auto cs = semigarch::fit_unit_garch(xi);
        const auto h_cs = semigarch::garch_filter(cs, xi);
        std::vector<double> sig(design.n);
        for (std::size_t t = 0; t < design.n; ++t) sig[t] = sd * std::sqrt(h_cs[t]);
        res.aae_cs = mean_abs_diff(sig, path.sigma);

        for (std::size_t k = 0; k < kn; ++k) {
          const auto fit = semigarch::fit_semigarch(bases[k], rs, design.ipi);
          res.aae_pc.push_back(mean_abs_diff(fit.sigma_total, path.sigma));
          res.lambda_pc.push_back(fit.scale.lambda_hat);
        }
        res.ok = true;
      } catch (const Error&) {
        res = ReplicationResult{};
      }
      results[j] = std::move(res);
    }
  };

  const unsigned threads = std::max(1u, design.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  SimReport report;
  report.n = design.n;
  report.replications = design.replications;
  report.seed = design.seed;

  MethodRow cs{"CS", 0, 0.0, 0.0, 0.0, {}};
  std::vector<MethodRow> pc(kn);
  std::vector<double> lambda_sum(kn, 0.0);
  for (std::size_t k = 0; k < kn; ++k) pc[k] = MethodRow{"PC", design.knot_grid[k], 0.0, 0.0, 0.0, {}};
  for (const auto& r : results) {
    if (!r.ok) {
      ++report.failures;
      continue;
    }
    cs.aae.push_back(r.aae_cs);
    for (std::size_t k = 0; k < kn; ++k) {
      pc[k].aae.push_back(r.aae_pc[k]);
      lambda_sum[k] += r.lambda_pc[k];
    }
  }
  if (cs.aae.empty()) throw NumericFailure("run_study: every replication failed");

  const double used = static_cast<double>(cs.aae.size());
  auto average = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / used;
  };
  cs.maae = average(cs.aae);
  report.m_cs = cs.maae;
  cs.rmaae = rmaae(cs.maae, report.m_cs);
  report.rows.push_back(std::move(cs));
  for (std::size_t k = 0; k < kn; ++k) {
    pc[k].maae = average(pc[k].aae);
    pc[k].rmaae = rmaae(pc[k].maae, report.m_cs);
    pc[k].mean_lambda = lambda_sum[k] / used;
    report.rows.push_back(std::move(pc[k]));
  }
  return report;
}

}  // namespace psgarch::sim
