// Command-line driver: simulation, estimation, descriptive statistics,
// single-model fit/forecast, rolling backtests, and report emission.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rvcop/dates.hpp"
#include "rvcop/harness.hpp"

namespace rvcop {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << text;
}

double parse_duration_seconds(const std::string& text) {
  double value = 0.0;
  char unit[8] = {0};
  const int got = std::sscanf(text.c_str(), "%lf%7s", &value, unit);
  if (got < 1 || value <= 0.0) throw DataError("bad duration '" + text + "'");
  const std::string u = unit;
  if (u.empty() || u == "s" || u == "sec") return value;
  if (u == "min" || u == "m") return value * 60.0;
  if (u == "h" || u == "hour") return value * 3600.0;
  throw DataError("bad duration unit '" + u + "' (use s, min, or h)");
}

VechHistory history_from_cov(const CovarianceSeries& series, Coord coord, int window) {
  const int t_total = series.size();
  const int start = window > 0 ? std::max(0, t_total - window) : 0;
  const int t_len = t_total - start;
  const int m = vech_size(series.dim());
  VechHistory h;
  h.coord = coord;
  h.series.resize(t_len, m);
  TransformStats stats;
  for (int t = 0; t < t_len; ++t)
    h.series.row(t) = to_coord(series.mats[start + t], coord, &stats).values.transpose();
  h.dates.assign(series.dates.begin() + start, series.dates.end());
  return h;
}

CopulaForecaster fit_forecaster(ModelId id, const VechHistory& h, int B,
                                std::uint64_t seed) {
  switch (id) {
    case ModelId::t1: return fit_mc1(h, CopulaFamily::t, B, seed);
    case ModelId::cl1: return fit_mc1(h, CopulaFamily::clayton, B, seed);
    case ModelId::t2: return fit_mc2(h, CopulaFamily::t, B, seed);
    case ModelId::cl2: return fit_mc2(h, CopulaFamily::clayton, B, seed);
    case ModelId::entry_t: return fit_entry(h, CopulaFamily::t, B, seed);
    case ModelId::entry_gb: return fit_entry(h, CopulaFamily::gumbel, B, seed);
    case ModelId::entry_cl: return fit_entry(h, CopulaFamily::clayton, B, seed);
    case ModelId::t_har: return fit_copula_har(h, CopulaFamily::t, B, seed);
    case ModelId::gb_har: return fit_copula_har(h, CopulaFamily::gumbel, B, seed);
    case ModelId::cl_har: return fit_copula_har(h, CopulaFamily::clayton, B, seed);
    default: throw DataError("model is not copula-based");
  }
}

Approach approach_of(ModelId id) {
  switch (id) {
    case ModelId::t1:
    case ModelId::cl1: return Approach::mc1;
    case ModelId::t2:
    case ModelId::cl2: return Approach::mc2;
    case ModelId::entry_t:
    case ModelId::entry_gb:
    case ModelId::entry_cl: return Approach::entry;
    default: return Approach::copula_har;
  }
}

CopulaFamily family_of(ModelId id) {
  switch (id) {
    case ModelId::t1:
    case ModelId::t2:
    case ModelId::entry_t:
    case ModelId::t_har: return CopulaFamily::t;
    case ModelId::entry_gb:
    case ModelId::gb_har: return CopulaFamily::gumbel;
    default: return CopulaFamily::clayton;
  }
}

// --------------------------- fit / forecast split ---------------------------

nlohmann::json har_to_json(const HarModel& h) {
  return {{"beta0", h.beta0}, {"beta_d", h.beta_d}, {"beta_w", h.beta_w},
          {"beta_m", h.beta_m}, {"residual_sd", h.residual_sd}};
}

HarModel har_from_json(const nlohmann::json& j) {
  HarModel h;
  h.beta0 = j.at("beta0");
  h.beta_d = j.at("beta_d");
  h.beta_w = j.at("beta_w");
  h.beta_m = j.at("beta_m");
  h.residual_sd = j.at("residual_sd");
  return h;
}

std::string fit_single_model(ModelId id, const CovarianceSeries& series,
                             const Matrix& returns, Coord coord, int window, int B,
                             std::uint64_t seed) {
  nlohmann::json j;
  j["model"] = model_name(id);
  j["coord"] = coord_name(coord);
  j["window"] = window;
  j["B"] = B;
  j["seed"] = seed;
  if (id == ModelId::har) {
    VechHistory h = history_from_cov(series, coord, window);
    nlohmann::json bank = nlohmann::json::array();
    for (int col = 0; col < h.width(); ++col) {
      std::vector<double> v(h.length());
      for (int i = 0; i < h.length(); ++i) v[i] = h.series(i, col);
      bank.push_back(har_to_json(har_fit(v)));
    }
    j["har_bank"] = bank;
  } else if (id == ModelId::varfima) {
    VechHistory h = history_from_cov(series, coord, window);
    VarfimaModel mdl = varfima_fit(h.series, std::min(100, h.length() / 2));
    j["varfima"] = {{"d", mdl.d},
                    {"phi", mdl.phi},
                    {"theta", mdl.theta},
                    {"trunc", mdl.trunc},
                    {"c", std::vector<double>(mdl.c.data(), mdl.c.data() + mdl.c.size())}};
  } else if (id == ModelId::dcc) {
    if (returns.size() == 0) throw DataError("dcc fit requires a daily-returns CSV");
    const int t_total = static_cast<int>(returns.rows());
    const int start = window > 0 ? std::max(0, t_total - window) : 0;
    DccModel mdl = dcc_fit(returns.middleRows(start, t_total - start));
    nlohmann::json garch = nlohmann::json::array();
    for (const GarchParams& g : mdl.garch)
      garch.push_back({{"omega", g.omega}, {"alpha", g.alpha}, {"beta", g.beta}});
    std::vector<double> qbar(mdl.qbar.data(), mdl.qbar.data() + mdl.qbar.size());
    j["dcc"] = {{"garch", garch},
                {"theta1", mdl.theta1},
                {"theta2", mdl.theta2},
                {"qbar", qbar},
                {"mu", std::vector<double>(mdl.mu.data(), mdl.mu.data() + mdl.mu.size())}};
  } else {
    VechHistory h = history_from_cov(series, coord, window);
    CopulaForecaster f = fit_forecaster(id, h, B, seed);
    nlohmann::json copulas = nlohmann::json::array();
    for (const CopulaModel& c : f.copulas)
      copulas.push_back(nlohmann::json::parse(copula_to_json(c)));
    j["copulas"] = copulas;
    j["copula_coords"] = f.copula_coords;
    if (!f.har.empty()) {
      nlohmann::json bank = nlohmann::json::array();
      for (const HarModel& hm : f.har) bank.push_back(har_to_json(hm));
      j["har"] = bank;
      j["har_coords"] = f.har_coords;
    }
  }
  return j.dump(2);
}

std::string next_date_label(const std::string& last) {
  try {
    return iso_date(next_business_day(parse_iso_date(last)));
  } catch (const DataError&) {
    return last + "+1";
  }
}

void forecast_single_model(const std::string& model_json, const CovarianceSeries& series,
                           const Matrix& returns, const std::string& out_path) {
  nlohmann::json j = nlohmann::json::parse(model_json);
  const ModelId id = model_from_name(j.at("model").get<std::string>());
  const Coord coord = coord_from_name(j.at("coord").get<std::string>());
  const int window = j.value("window", 0);
  const std::string date = next_date_label(series.dates.back());

  Matrix forecast;
  if (id == ModelId::har) {
    VechHistory h = history_from_cov(series, coord, window);
    const int t_len = h.length();
    Vector v(h.width());
    std::vector<double> recent(22);
    const auto bank = j.at("har_bank");
    for (int col = 0; col < h.width(); ++col) {
      for (int i = 0; i < 22; ++i) recent[i] = h.series(t_len - 22 + i, col);
      v[col] = har_forecast(har_from_json(bank.at(col)), recent);
    }
    forecast = reconstruct_spd(VechVector{coord, v});
  } else if (id == ModelId::varfima) {
    VechHistory h = history_from_cov(series, coord, window);
    const auto& jv = j.at("varfima");
    VarfimaModel mdl;
    mdl.d = jv.at("d");
    mdl.phi = jv.at("phi");
    mdl.theta = jv.at("theta");
    mdl.trunc = jv.at("trunc");
    const auto c = jv.at("c").get<std::vector<double>>();
    mdl.c = Eigen::Map<const Vector>(c.data(), static_cast<long>(c.size()));
    forecast = reconstruct_spd(VechVector{coord, varfima_forecast(mdl, h.series)});
  } else if (id == ModelId::dcc) {
    if (returns.size() == 0) throw DataError("dcc forecast requires a daily-returns CSV");
    const auto& jd = j.at("dcc");
    DccModel mdl;
    for (const auto& g : jd.at("garch"))
      mdl.garch.push_back({g.at("omega"), g.at("alpha"), g.at("beta")});
    mdl.theta1 = jd.at("theta1");
    mdl.theta2 = jd.at("theta2");
    const auto qbar = jd.at("qbar").get<std::vector<double>>();
    const int n = static_cast<int>(mdl.garch.size());
    mdl.qbar = Eigen::Map<const Matrix>(qbar.data(), n, n);
    const auto mu = jd.at("mu").get<std::vector<double>>();
    mdl.mu = Eigen::Map<const Vector>(mu.data(), n);
    const int t_total = static_cast<int>(returns.rows());
    const int start = window > 0 ? std::max(0, t_total - window) : 0;
    forecast = dcc_forecast(mdl, returns.middleRows(start, t_total - start));
  } else {
    // marginals are rebuilt from the same window the model was fitted on
    VechHistory h = history_from_cov(series, coord, window);
    CopulaForecaster f;
    f.approach = approach_of(id);
    f.family = family_of(id);
    f.coord = coord;
    f.m = h.width();
    f.B = j.value("B", 1000);
    f.seed = j.value("seed", std::uint64_t{1});
    for (int col = 0; col < h.width(); ++col) {
      std::vector<double> v(h.length());
      for (int i = 0; i < h.length(); ++i) v[i] = h.series(i, col);
      f.marginals.emplace_back(std::move(v));
    }
    for (const auto& jc : j.at("copulas"))
      f.copulas.push_back(copula_from_json(jc.dump()));
    f.copula_coords = j.at("copula_coords").get<std::vector<int>>();
    if (j.contains("har")) {
      for (const auto& jh : j.at("har")) f.har.push_back(har_from_json(jh));
      f.har_coords = j.at("har_coords").get<std::vector<int>>();
    }
    forecast = forecast_one(f, h).mat;
  }
  CovarianceSeries out;
  out.dates = {date};
  out.mats = {forecast};
  write_forecast_csv(out_path, {model_name(id)}, {{model_name(id), out}});
}

// ------------------------------- subcommands --------------------------------

struct SimulateArgs {
  int assets = 6, days = 300, intervals = 78;
  double noise_sd = 0.0;
  std::uint64_t seed = 1;
  SimParams params;
  std::string out_prefix = "sim";
};

void cmd_simulate(const SimulateArgs& a) {
  SimulatedData sim =
      simulate_panel(a.assets, a.days, a.intervals, a.params, a.noise_sd, a.seed);
  write_intraday_csv(a.out_prefix + "_intraday.csv", sim.panel);
  write_covariance_csv(a.out_prefix + "_truecov.csv", sim.true_cov);
  write_daily_returns_csv(a.out_prefix + "_returns.csv", sim.panel,
                          daily_returns(sim.panel));
  log_json("info", "simulated panel written",
           {{"prefix", a.out_prefix}, {"days", std::to_string(a.days)}});
}

void cmd_estimate(const std::string& input, const std::string& step, int subgrids,
                  double align_seconds, const std::string& out) {
  IntradayPanel panel = read_intraday_csv(input, align_seconds);
  const double tick = panel.grid_seconds[1] - panel.grid_seconds[0];
  const double step_seconds = parse_duration_seconds(step);
  const int base_step = std::max(1, static_cast<int>(std::lround(step_seconds / tick)));
  CovarianceSeries series;
  series.dates = panel.dates;
  series.mats.resize(panel.n_days());
  for (int d = 0; d < panel.n_days(); ++d)
    series.mats[d] = subsampled_realized_cov(panel, d, base_step, subgrids).mat;
  write_covariance_csv(out, series);
  log_json("info", "covariance series written",
           {{"out", out},
            {"base_step", std::to_string(base_step)},
            {"subgrids", std::to_string(subgrids)}});
}

void cmd_stats(const std::string& input, const std::string& coord_name_str,
               const std::string& assets_csv, const std::string& out) {
  CovarianceSeries series = read_covariance_csv(input);
  const Coord coord = coord_from_name(coord_name_str);
  VechHistory h = history_from_cov(series, coord, 0);
  std::vector<std::string> assets;
  if (!assets_csv.empty()) {
    std::stringstream ss(assets_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) assets.push_back(tok);
    if (static_cast<int>(assets.size()) != series.dim())
      throw DataError("--assets must list exactly " + std::to_string(series.dim()) +
                      " names");
  } else {
    for (int i = 0; i < series.dim(); ++i) assets.push_back("A" + std::to_string(i + 1));
  }
  std::vector<std::string> labels;
  std::vector<SummaryStats> stats;
  for (int col = 0; col < h.width(); ++col) {
    std::vector<double> v(h.length());
    for (int i = 0; i < h.length(); ++i) v[i] = h.series(i, col);
    labels.push_back(vech_label(col, assets));
    stats.push_back(summary_stats(v));
  }
  write_summary_stats_csv(out, labels, stats);
}

void cmd_backtest(const std::string& config_path, const std::string& out_dir) {
  const std::string text = slurp(config_path);
  BacktestConfig cfg = BacktestConfig::from_json(text);
  if (const char* env = std::getenv("RVCOP_THREADS")) cfg.threads = std::atoi(env);
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("data")) throw DataError("config: missing 'data' section");
  DataBundle data = load_data(DataSpec::from_json(j["data"].dump()));
  BacktestRun run = rolling_backtest(cfg, data);
  write_backtest_outputs(run, out_dir);
  log_json("info", "backtest finished",
           {{"out_dir", out_dir},
            {"days", std::to_string(run.realized_out.size())},
            {"failures", std::to_string(run.failures.size())},
            {"wall_seconds", std::to_string(run.wall_seconds)}});
}

void cmd_report(const std::string& forecasts_path, const std::string& realized_path,
                const EvalOptions& eval, std::uint64_t seed, const std::string& out) {
  const auto forecasts = read_forecast_csv(forecasts_path);
  const CovarianceSeries realized = read_covariance_csv(realized_path);
  // align realized to the forecast dates
  nlohmann::json models;
  const SteinOrientation orientation = eval.stein_literal
                                           ? SteinOrientation::literal_formula
                                           : SteinOrientation::underprediction_penalizing;
  std::map<std::string, std::vector<double>> stein_losses;
  for (const auto& [name, fcst] : forecasts) {
    CovarianceSeries sub;
    for (int t = 0; t < fcst.size(); ++t) {
      const auto it =
          std::find(realized.dates.begin(), realized.dates.end(), fcst.dates[t]);
      if (it == realized.dates.end())
        throw DataError("no realized matrix for forecast date " + fcst.dates[t]);
      sub.dates.push_back(fcst.dates[t]);
      sub.mats.push_back(realized.mats[it - realized.dates.begin()]);
    }
    std::vector<double> series(fcst.size());
    for (int t = 0; t < fcst.size(); ++t)
      series[t] = stein_loss(fcst.mats[t], sub.mats[t], orientation);
    stein_losses[name] = series;
    models[name]["rmse"] = frobenius_rmse(fcst, sub);
    double acc = 0.0;
    for (double v : series) acc += v;
    models[name]["mean_stein"] = acc / series.size();
  }
  const int t_out = static_cast<int>(stein_losses.begin()->second.size());
  const int block = eval.block_len > 0 ? eval.block_len : default_block_len(t_out);
  McsResult mc = mcs(stein_losses, eval.alpha, eval.n_boot, block, seed);
  for (auto& [name, je] : models.items()) {
    je["mcs_pvalue"] = mc.pvalues.at(name);
    je["in_mcs_stein"] = std::find(mc.retained.begin(), mc.retained.end(), name) !=
                         mc.retained.end();
  }
  nlohmann::json report;
  report["models"] = models;
  report["mcs_stein_retained"] = mc.retained;
  report["alpha"] = eval.alpha;
  spit(out, report.dump(2) + "\n");
}

void cmd_frontier(const std::string& forecasts_path, const std::string& realized_path,
                  const std::string& returns_path, int points, const std::string& out) {
  const auto forecasts = read_forecast_csv(forecasts_path);
  const CovarianceSeries realized_all = read_covariance_csv(realized_path);
  std::vector<std::string> ret_dates;
  const auto [assets, returns] = read_daily_returns_csv(returns_path, &ret_dates);

  // use the first model's dates as the out-of-sample axis
  const CovarianceSeries& axis = forecasts.begin()->second;
  CovarianceSeries realized;
  Matrix expected(axis.size(), returns.cols());
  for (int t = 0; t < axis.size(); ++t) {
    const auto it =
        std::find(realized_all.dates.begin(), realized_all.dates.end(), axis.dates[t]);
    if (it == realized_all.dates.end())
      throw DataError("no realized matrix for forecast date " + axis.dates[t]);
    realized.dates.push_back(axis.dates[t]);
    realized.mats.push_back(realized_all.mats[it - realized_all.dates.begin()]);
    const auto rit = std::find(ret_dates.begin(), ret_dates.end(), axis.dates[t]);
    const long idx = rit - ret_dates.begin();
    if (rit == ret_dates.end() || idx == 0)
      throw DataError("need return history strictly before forecast date " + axis.dates[t]);
    expected.row(t) = returns.topRows(idx).colwise().mean();
  }
  const std::vector<double> grid = default_mu_grid(expected, points);
  write_frontier_csv(out, efficient_frontier(forecasts, realized, expected, grid));
}

void cmd_heatmap(const std::string& input, const std::string& coord_str,
                 const std::string& out) {
  CovarianceSeries series = read_covariance_csv(input);
  VechHistory h = history_from_cov(series, coord_from_name(coord_str), 0);
  write_rank_corr_csv(out, rank_corr_matrix(h));
}

}  // namespace
}  // namespace rvcop

int main(int argc, char** argv) {
  using namespace rvcop;
  CLI::App app{"copula-based realized volatility matrix forecasting"};
  app.require_subcommand(1);

  // simulate
  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "generate a synthetic intraday panel");
  c_sim->add_option("--assets", sim.assets);
  c_sim->add_option("--days", sim.days);
  c_sim->add_option("--intervals", sim.intervals);
  c_sim->add_option("--noise-sd", sim.noise_sd);
  c_sim->add_option("--seed", sim.seed);
  c_sim->add_option("--mean-log-var", sim.params.mean_log_var);
  c_sim->add_option("--kappa", sim.params.kappa);
  c_sim->add_option("--vol-of-vol", sim.params.vol_of_vol);
  c_sim->add_option("--corr", sim.params.corr);
  c_sim->add_option("--drift", sim.params.drift);
  c_sim->add_option("--out-prefix", sim.out_prefix);

  // estimate
  std::string est_input, est_step = "5min", est_out = "cov.csv";
  int est_subgrids = 1;
  double est_align = 0.0;
  auto* c_est = app.add_subcommand("estimate",
                                   "realized covariance series from an intraday CSV");
  c_est->add_option("--input", est_input)->required();
  c_est->add_option("--step", est_step, "sampling step, e.g. 5min or 30s");
  c_est->add_option("--subgrids", est_subgrids, "number of averaged subgrids K");
  c_est->add_option("--align", est_align, "previous-tick alignment grid in seconds");
  c_est->add_option("--out", est_out);

  // stats
  std::string st_input, st_coord = "cholesky", st_assets, st_out = "stats.csv";
  auto* c_st = app.add_subcommand("stats", "descriptive statistics of vech coordinates");
  c_st->add_option("--input", st_input)->required();
  c_st->add_option("--coord", st_coord);
  c_st->add_option("--assets", st_assets, "comma-separated asset names for labels");
  c_st->add_option("--out", st_out);

  // fit
  std::string f_input, f_model = "entry-t", f_coord = "cholesky", f_out = "model.json";
  std::string f_returns;
  int f_window = 0, f_B = 1000;
  std::uint64_t f_seed = 1;
  auto* c_fit = app.add_subcommand("fit", "fit a single model, write model JSON");
  c_fit->add_option("--input", f_input)->required();
  c_fit->add_option("--model", f_model);
  c_fit->add_option("--coord", f_coord);
  c_fit->add_option("--window", f_window, "trailing window (0 = all)");
  c_fit->add_option("--B", f_B);
  c_fit->add_option("--seed", f_seed);
  c_fit->add_option("--returns", f_returns, "daily-returns CSV (dcc only)");
  c_fit->add_option("--out", f_out);

  // forecast
  std::string fc_input, fc_model_file, fc_returns, fc_out = "forecast.csv";
  auto* c_fc = app.add_subcommand("forecast", "one-step forecast from a model JSON");
  c_fc->add_option("--input", fc_input)->required();
  c_fc->add_option("--model-file", fc_model_file)->required();
  c_fc->add_option("--returns", fc_returns);
  c_fc->add_option("--out", fc_out);

  // backtest
  std::string bt_config, bt_out_dir = "backtest_out";
  auto* c_bt = app.add_subcommand("backtest", "rolling-window backtest from a config file");
  c_bt->add_option("--config", bt_config)->required();
  c_bt->add_option("--out-dir", bt_out_dir);

  // report
  std::string rp_forecasts, rp_realized, rp_out = "report.json";
  EvalOptions rp_eval;
  std::uint64_t rp_seed = 1;
  auto* c_rp = app.add_subcommand("report", "loss report from forecast and realized CSVs");
  c_rp->add_option("--forecasts", rp_forecasts)->required();
  c_rp->add_option("--realized", rp_realized)->required();
  c_rp->add_option("--alpha", rp_eval.alpha);
  c_rp->add_option("--n-boot", rp_eval.n_boot);
  c_rp->add_option("--block-len", rp_eval.block_len);
  c_rp->add_flag("--stein-literal", rp_eval.stein_literal);
  c_rp->add_option("--seed", rp_seed);
  c_rp->add_option("--out", rp_out);

  // frontier
  std::string fr_forecasts, fr_realized, fr_returns, fr_out = "frontier.csv";
  int fr_points = 40;
  auto* c_fr = app.add_subcommand("frontier", "ex-post efficient frontiers");
  c_fr->add_option("--forecasts", fr_forecasts)->required();
  c_fr->add_option("--realized", fr_realized)->required();
  c_fr->add_option("--returns", fr_returns)->required();
  c_fr->add_option("--points", fr_points);
  c_fr->add_option("--out", fr_out);

  // heatmap-data
  std::string hm_input, hm_coord = "cholesky", hm_out = "rank_corr.csv";
  auto* c_hm = app.add_subcommand("heatmap-data", "lagged rank-correlation matrix CSV");
  c_hm->add_option("--input", hm_input)->required();
  c_hm->add_option("--coord", hm_coord);
  c_hm->add_option("--out", hm_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  try {
    if (*c_sim) cmd_simulate(sim);
    if (*c_est) cmd_estimate(est_input, est_step, est_subgrids, est_align, est_out);
    if (*c_st) cmd_stats(st_input, st_coord, st_assets, st_out);
    if (*c_fit) {
      const CovarianceSeries series = read_covariance_csv(f_input);
      Matrix returns;
      if (!f_returns.empty()) returns = read_daily_returns_csv(f_returns).second;
      spit(f_out, fit_single_model(model_from_name(f_model), series, returns,
                                   coord_from_name(f_coord), f_window, f_B, f_seed) +
                      "\n");
    }
    if (*c_fc) {
      const CovarianceSeries series = read_covariance_csv(fc_input);
      Matrix returns;
      if (!fc_returns.empty()) returns = read_daily_returns_csv(fc_returns).second;
      forecast_single_model(slurp(fc_model_file), series, returns, fc_out);
    }
    if (*c_bt) cmd_backtest(bt_config, bt_out_dir);
    if (*c_rp) cmd_report(rp_forecasts, rp_realized, rp_eval, rp_seed, rp_out);
    if (*c_fr) cmd_frontier(fr_forecasts, fr_realized, fr_returns, fr_points, fr_out);
    if (*c_hm) cmd_heatmap(hm_input, hm_coord, hm_out);
  } catch (const DataError& e) {
    log_json("error", e.what(), {{"kind", "data"}});
    return 2;
  } catch (const NumericError& e) {
    log_json("error", e.what(), {{"kind", "numeric"}});
    return 3;
  } catch (const std::exception& e) {
    log_json("error", e.what(), {{"kind", "unexpected"}});
    return 3;
  }
  return 0;
}
