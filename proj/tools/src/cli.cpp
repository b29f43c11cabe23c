#include "psgarch_cli/cli.hpp"

#include "psgarch/errors.hpp"
#include "psgarch/risk.hpp"
#include "psgarch/simulation.hpp"
#include "psgarch_cli/csv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace psgarch::cli {

namespace {

using nlohmann::ordered_json;

struct Series {
  semigarch::ReturnSeries returns;
  std::vector<std::string> dates;   // aligned with returns, empty without a date column
};

void write_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + cfg.out_dir + "'");
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw InvalidInput("write failed for '" + path.string() + "'");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string fmt(double x) { return format_number(x); }

Series load_returns(const RunConfig& cfg) {
  const bool has_price = !cfg.price_col.empty();
  const bool has_return = !cfg.return_col.empty();
  if (has_price == has_return) {
    throw InvalidConfiguration("exactly one of --price-col and --return-col is required");
  }
  const Table t = read_csv(cfg.input_path);
  Series s;
  std::vector<std::string> dates;
  if (!cfg.date_col.empty()) dates = date_column(t, cfg.date_col);
  if (has_price) {
    s.returns = semigarch::to_returns(numeric_column(t, cfg.price_col));
    if (!dates.empty()) s.dates.assign(dates.begin() + 1, dates.end());
  } else {
    s.returns = semigarch::from_returns(numeric_column(t, cfg.return_col));
    s.dates = std::move(dates);
  }
  return s;
}

semigarch::GarchFitOptions garch_options(const RunConfig& cfg) {
  semigarch::GarchFitOptions o;
  o.fixed_nu = cfg.nu;
  return o;
}

ordered_json ipi_json(const RunConfig& cfg, const ipi::IpiResult& r, std::size_t n) {
  ordered_json j;
  j["p"] = cfg.ipi.p;
  j["knots"] = cfg.ipi.knots_for(n);
  j["lambda0"] = cfg.ipi.lambda0;
  j["tol"] = cfg.ipi.tol_for(n);
  j["max_iter"] = cfg.ipi.max_iter;
  j["squared_norm_denominator"] = cfg.ipi.squared_norm_denominator;
  j["pinv_tol"] = cfg.ipi.pinv_tol;
  j["lambda_hat"] = r.lambda_hat;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["c_f"] = r.spectral.c_f;
  j["window_width"] = r.spectral.window_width;
  j["cf_floor_hit"] = r.cf_floor_hit;
  j["large_knot_regime"] = r.large_knot_regime;
  j["trace_s"] = r.fit.trace_s;
  j["trace_s2"] = r.fit.trace_s2;
  j["kqa_trace"] = r.kqa_trace;
  ordered_json log = ordered_json::array();
  for (const auto& it : r.log) {
    log.push_back({{"lambda_in", it.lambda_in},
                   {"lambda_out", it.lambda_out},
                   {"c_f", it.c_f},
                   {"window_width", it.window_width},
                   {"kqa", it.kqa}});
  }
  j["log"] = std::move(log);
  return j;
}

ordered_json garch_json(const semigarch::GarchParams& g) {
  ordered_json j;
  j["dist"] = semigarch::to_string(g.dist);
  j["alpha0"] = g.alpha0;
  j["alpha1"] = g.alpha1;
  j["beta1"] = g.beta1;
  if (g.dist == semigarch::Innovation::StudentT) j["nu"] = g.nu;
  j["loglik"] = g.loglik;
  return j;
}

ordered_json fit_json(const RunConfig& cfg, const semigarch::SemiGarchFit& f) {
  ordered_json j;
  j["n"] = f.returns.returns.size();
  j["mean"] = f.returns.mean;
  j["zero_replacements"] = f.scale.zero_replacements;
  j["c_eps"] = f.scale.c_eps;
  j["smoothing"] = ipi_json(cfg, f.scale.ipi, f.returns.returns.size());
  j["garch"] = garch_json(f.garch);
  return j;
}

}  // namespace

int cmd_smooth(const RunConfig& cfg, std::ostream& out) {
  if (cfg.series_col.empty()) throw InvalidConfiguration("smooth needs --series-col");
  const Table t = read_csv(cfg.input_path);
  const auto y = numeric_column(t, cfg.series_col);
  std::vector<std::string> dates;
  if (!cfg.date_col.empty()) dates = date_column(t, cfg.date_col);
  const auto r = ipi::select_lambda(y, cfg.ipi);

  ordered_json j;
  j["command"] = "smooth";
  j["input"] = cfg.input_path;
  j["column"] = cfg.series_col;
  j["n"] = y.size();
  j["smoothing"] = ipi_json(cfg, r, y.size());
  write_file(cfg, "smooth.json", dump(j));

  std::ostringstream csv;
  csv << (dates.empty() ? "" : "date,") << "tau,y,m_hat,residual\n";
  const double n = static_cast<double>(y.size());
  for (std::size_t t2 = 0; t2 < y.size(); ++t2) {
    if (!dates.empty()) csv << dates[t2] << ',';
    csv << fmt((static_cast<double>(t2) + 0.5) / n) << ',' << fmt(y[t2]) << ','
        << fmt(r.fit.fitted[t2]) << ',' << fmt(r.fit.residuals[t2]) << '\n';
  }
  write_file(cfg, "smooth_trend.csv", csv.str());
  out << "lambda_hat " << fmt(r.lambda_hat) << " after " << r.iterations << " iterations"
      << (r.converged ? "" : " (not converged)") << '\n';
  return kExitOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const Series s = load_returns(cfg);
  const auto f = semigarch::fit_semigarch(s.returns, cfg.ipi, cfg.dist, garch_options(cfg));

  ordered_json j;
  j["command"] = "fit";
  j["input"] = cfg.input_path;
  j["fit"] = fit_json(cfg, f);
  write_file(cfg, "fit.json", dump(j));

  std::ostringstream csv;
  csv << (s.dates.empty() ? "" : "date,") << "tau,return,v_hat,scale,lower,upper,h,sigma_total,xi\n";
  const auto& rs = f.returns;
  for (std::size_t t = 0; t < rs.returns.size(); ++t) {
    if (!s.dates.empty()) csv << s.dates[t] << ',';
    const double sc = std::sqrt(f.scale.v_hat[t]);
    csv << fmt(rs.tau[t]) << ',' << fmt(rs.returns[t]) << ',' << fmt(f.scale.v_hat[t]) << ','
        << fmt(sc) << ',' << fmt(rs.mean - sc) << ',' << fmt(rs.mean + sc) << ',' << fmt(f.h[t])
        << ',' << fmt(f.sigma_total[t]) << ',' << fmt(f.xi[t]) << '\n';
  }
  write_file(cfg, "fit_series.csv", csv.str());
  out << "lambda_hat " << fmt(f.scale.lambda_hat) << ", alpha1 " << fmt(f.garch.alpha1)
      << ", beta1 " << fmt(f.garch.beta1) << '\n';
  return kExitOk;
}

int cmd_forecast(const RunConfig& cfg, std::ostream& out) {
  if (cfg.alphas.empty()) throw InvalidConfiguration("at least one --alpha is required");
  if (cfg.horizon == 0) throw InvalidConfiguration("--horizon must be positive");
  const Series s = load_returns(cfg);
  const auto& all = s.returns.returns;
  if (all.size() <= cfg.horizon) {
    throw InvalidInput("insufficient data: " + std::to_string(all.size()) +
                       " returns cannot hold out " + std::to_string(cfg.horizon));
  }
  const std::size_t n_in = all.size() - cfg.horizon;
  const std::vector<double> in_sample(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_in));
  const std::vector<double> out_sample(all.begin() + static_cast<std::ptrdiff_t>(n_in), all.end());
  const auto rs = semigarch::from_returns(in_sample);
  const auto f = semigarch::fit_semigarch(rs, cfg.ipi, cfg.dist, garch_options(cfg));
  const auto state = risk::ForecastState::from_fit(f);

  std::vector<risk::RiskForecast> fc;
  for (double a : cfg.alphas) fc.push_back(risk::rolling_forecast(state, out_sample, a));

  ordered_json j;
  j["command"] = "forecast";
  j["input"] = cfg.input_path;
  j["horizon"] = cfg.horizon;
  j["in_sample"] = n_in;
  j["fit"] = fit_json(cfg, f);
  j["v_last"] = state.v_last;
  ordered_json levels = ordered_json::array();
  for (const auto& r : fc) {
    ordered_json l;
    l["alpha"] = r.alpha;
    l["var_factor"] = risk::var_factor(f.garch.dist, f.garch.nu, r.alpha);
    l["es_factor"] = risk::es_factor(f.garch.dist, f.garch.nu, r.alpha);
    l["alpha_star"] = f.garch.dist == semigarch::Innovation::StudentT
                          ? risk::alpha_star(f.garch.nu, r.alpha)
                          : risk::alpha_star_normal(r.alpha);
    l["pot_var"] = r.pot_var;
    l["pot_es"] = r.pot_es;
    l["zone_var"] = r.zone ? risk::to_string(*r.zone) : "n/a";
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  write_file(cfg, "forecast.json", dump(j));

  std::ostringstream csv;
  csv << "k," << (s.dates.empty() ? "" : "date,") << "return,loss,h";
  for (const auto& r : fc) csv << ",var_" << fmt(r.alpha) << ",es_" << fmt(r.alpha);
  csv << '\n';
  for (std::size_t k = 0; k < cfg.horizon; ++k) {
    csv << (k + 1) << ',';
    if (!s.dates.empty()) csv << s.dates[n_in + k] << ',';
    csv << fmt(out_sample[k]) << ',' << fmt(fc.front().losses[k]) << ',' << fmt(fc.front().h_path[k]);
    for (const auto& r : fc) csv << ',' << fmt(r.var_path[k]) << ',' << fmt(r.es_path[k]);
    csv << '\n';
  }
  write_file(cfg, "forecast_paths.csv", csv.str());
  for (const auto& r : fc) {
    out << "alpha " << fmt(r.alpha) << ": POT(VaR) " << r.pot_var << ", POT(ES) " << r.pot_es;
    if (r.zone) out << ", " << risk::to_string(*r.zone);
    out << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  sim::SimDesign d;
  if (cfg.scale == "sine") {
    d.scale_fn = sim::sine_scale(cfg.amplitude);
  } else if (cfg.scale == "constant") {
    d.scale_fn = sim::constant_scale(1.0);
  } else if (cfg.scale == "csv") {
    if (cfg.scale_csv.empty()) throw InvalidConfiguration("--scale csv needs --scale-csv");
    const Table t = read_csv(cfg.scale_csv);
    d.scale_fn = sim::tabulated_scale(numeric_column(t, "tau"), numeric_column(t, "v"));
  } else {
    throw InvalidConfiguration("unknown scale '" + cfg.scale + "'");
  }
  d.alpha1 = cfg.garch_alpha;
  d.beta1 = cfg.garch_beta;
  d.n = cfg.sim_n;
  d.replications = cfg.replications;
  d.seed = cfg.seed;
  d.knot_grid = cfg.knot_grid;
  d.ipi = cfg.ipi;
  d.threads = cfg.threads;
  const auto rep = sim::run_study(d);

  ordered_json j;
  j["command"] = "simulate";
  j["scale"] = cfg.scale;
  if (cfg.scale == "sine") j["amplitude"] = cfg.amplitude;
  j["garch_alpha"] = d.alpha1;
  j["garch_beta"] = d.beta1;
  j["n"] = rep.n;
  j["replications"] = rep.replications;
  j["failures"] = rep.failures;
  j["seed"] = rep.seed;
  j["m_cs"] = rep.m_cs;
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"method", r.method},
                    {"knots", r.knots},
                    {"maae", r.maae},
                    {"rmaae", r.rmaae},
                    {"mean_lambda", r.mean_lambda}});
  }
  j["rows"] = std::move(rows);
  write_file(cfg, "simulate.json", dump(j));

  std::ostringstream table;
  table << "method,K,M_x1e4,R_pct,mean_lambda\n";
  for (const auto& r : rep.rows) {
    table << r.method << ',' << r.knots << ',' << fmt(r.maae * 1e4) << ',' << fmt(r.rmaae) << ','
          << fmt(r.mean_lambda) << '\n';
  }
  write_file(cfg, "simulate_table.csv", table.str());

  std::ostringstream aae;
  aae << "replication";
  for (const auto& r : rep.rows) aae << ',' << r.method << (r.knots ? std::to_string(r.knots) : "");
  aae << '\n';
  const std::size_t used = rep.rows.front().aae.size();
  for (std::size_t i = 0; i < used; ++i) {
    aae << i + 1;
    for (const auto& r : rep.rows) aae << ',' << fmt(r.aae[i]);
    aae << '\n';
  }
  write_file(cfg, "simulate_aae.csv", aae.str());

  for (const auto& r : rep.rows) {
    out << r.method << (r.knots ? std::to_string(r.knots) : "") << "  M*1e4 " << fmt(r.maae * 1e4)
        << "  R " << fmt(r.rmaae) << '\n';
  }
  if (rep.failures) out << rep.failures << " replications failed\n";
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  int knots = 0;
  double tol = 0.0;
  double nu = 0.0;
  std::string dist = "normal";

  CLI::App app{"P-spline smoothing and semiparametric GARCH volatility analysis", "psgarch"};
  app.require_subcommand(1);

  auto shared = [&](CLI::App* sub, bool returns) {
    sub->add_option("--input", cfg.input_path, "Input CSV with a header row")->required();
    sub->add_option("--date-col", cfg.date_col, "Optional ISO-8601 date column");
    if (returns) {
      sub->add_option("--price-col", cfg.price_col, "Column of prices (log returns are taken)");
      sub->add_option("--return-col", cfg.return_col, "Column of returns");
    }
  };
  auto smoothing = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.ipi.p, "Spline degree")->check(CLI::Range(1, 10));
    sub->add_option("--knots", knots, "Number of knots (default min(n/4, 40))")
        ->check(CLI::PositiveNumber);
    sub->add_option("--lambda0", cfg.ipi.lambda0, "Initial smoothing parameter")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Convergence tolerance (default 1/n)")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.ipi.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    sub->add_flag("--squared-norm-denominator", cfg.ipi.squared_norm_denominator,
                  "Square the curvature norm in the plug-in formula");
    sub->add_option("--pinv-tol", cfg.ipi.pinv_tol, "Relative eigenvalue cutoff of the generalized inverse")
        ->check(CLI::Range(1e-300, 0.999));
    sub->add_option("--out-dir", cfg.out_dir, "Output directory");
  };
  auto garch = [&](CLI::App* sub) {
    sub->add_option("--dist", dist, "Innovation distribution")
        ->check(CLI::IsMember({"normal", "t"}));
    sub->add_option("--nu", nu, "Fix the t degrees of freedom (> 4)");
  };

  auto* smooth = app.add_subcommand("smooth", "Select the smoothing parameter for a series");
  shared(smooth, false);
  smooth->add_option("--series-col", cfg.series_col, "Column to smooth")->required();
  smoothing(smooth);

  auto* fit = app.add_subcommand("fit", "Fit the P-spline semiparametric GARCH model");
  shared(fit, true);
  smoothing(fit);
  garch(fit);

  auto* forecast = app.add_subcommand("forecast", "Rolling one-day VaR and ES backtest");
  shared(forecast, true);
  smoothing(forecast);
  garch(forecast);
  forecast->add_option("--alpha", cfg.alphas, "Confidence levels")
      ->delimiter(',')
      ->check(CLI::Range(0.5, 0.99999));
  forecast->add_option("--horizon", cfg.horizon, "Out-of-sample length")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo volatility study");
  smoothing(simulate);
  simulate->add_option("--n", cfg.sim_n, "Sample size");
  simulate->add_option("--replications", cfg.replications, "Number of replications");
  simulate->add_option("--scale", cfg.scale, "Scale function")
      ->check(CLI::IsMember({"sine", "constant", "csv"}));
  simulate->add_option("--amplitude", cfg.amplitude, "Amplitude of the sine scale");
  simulate->add_option("--scale-csv", cfg.scale_csv, "CSV with columns tau,v");
  simulate->add_option("--garch-alpha", cfg.garch_alpha, "GARCH alpha1");
  simulate->add_option("--garch-beta", cfg.garch_beta, "GARCH beta1");
  simulate->add_option("--knot-grid", cfg.knot_grid, "Knot counts to sweep")->delimiter(',');
  simulate->add_option("--seed", cfg.seed, "Master seed");
  simulate->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (knots > 0) cfg.ipi.knots = knots;
    if (tol > 0.0) cfg.ipi.tol = tol;
    cfg.dist = semigarch::innovation_from_string(dist);
    for (auto* sub : {fit, forecast}) {
      if (sub->parsed() && sub->count("--nu")) {
        if (cfg.dist != semigarch::Innovation::StudentT) {
          throw InvalidConfiguration("--nu applies to --dist t only");
        }
        cfg.nu = nu;
      }
    }
    if (smooth->parsed()) return cmd_smooth(cfg, out);
    if (fit->parsed()) return cmd_fit(cfg, out);
    if (forecast->parsed()) return cmd_forecast(cfg, out);
    return cmd_simulate(cfg, out);
  } catch (const NumericFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace psgarch::cli
