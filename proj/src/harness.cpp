#include "rvcop/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <variant>

#include <json.hpp>

#include "rvcop/rng.hpp"

namespace rvcop {

// ---------------------------------------------------------------------------
// Model registry
// ---------------------------------------------------------------------------

namespace {

struct ModelInfo {
  ModelId id;
  const char* name;
};

constexpr ModelInfo kModels[] = {
    {ModelId::dcc, "dcc"},           {ModelId::har, "har"},
    {ModelId::varfima, "varfima"},   {ModelId::t1, "t1"},
    {ModelId::t2, "t2"},             {ModelId::cl1, "cl1"},
    {ModelId::cl2, "cl2"},           {ModelId::entry_t, "entry-t"},
    {ModelId::entry_gb, "entry-gb"}, {ModelId::entry_cl, "entry-cl"},
    {ModelId::t_har, "t-har"},       {ModelId::gb_har, "gb-har"},
    {ModelId::cl_har, "cl-har"},
};

}  // namespace

const char* model_name(ModelId id) {
  for (const ModelInfo& m : kModels)
    if (m.id == id) return m.name;
  return "?";
}

ModelId model_from_name(const std::string& name) {
  for (const ModelInfo& m : kModels)
    if (name == m.name) return m.id;
  throw DataError("unknown model '" + name + "'");
}

std::vector<ModelId> all_models() {
  std::vector<ModelId> out;
  for (const ModelInfo& m : kModels) out.push_back(m.id);
  return out;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void BacktestConfig::validate() const {
  if (window < 45) throw DataError("config: window must be >= 45");
  if (models.empty()) throw DataError("config: models must be nonempty");
  if (coords.empty()) throw DataError("config: coords must be nonempty");
  if (B < 1) throw DataError("config: B must be >= 1");
  if (refit_every < 1) throw DataError("config: refit_every must be >= 1");
}

BacktestConfig BacktestConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  BacktestConfig cfg;
  cfg.window = j.value("window", cfg.window);
  if (j.contains("coord")) {
    const std::string c = j["coord"].get<std::string>();
    if (c == "both") {
      cfg.coords = {Coord::cholesky, Coord::logmatrix};
    } else {
      cfg.coords = {coord_from_name(c)};
    }
  }
  if (j.contains("models")) {
    cfg.models.clear();
    for (const auto& m : j["models"]) {
      const std::string name = m.get<std::string>();
      if (name == "all") {
        cfg.models = all_models();
        break;
      }
      cfg.models.push_back(model_from_name(name));
    }
  }
  cfg.B = j.value("B", cfg.B);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.refit_every = j.value("refit_every", cfg.refit_every);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    cfg.eval.alpha = e.value("alpha", cfg.eval.alpha);
    cfg.eval.n_boot = e.value("n_boot", cfg.eval.n_boot);
    cfg.eval.block_len = e.value("block_len", cfg.eval.block_len);
    cfg.eval.mu_points = e.value("mu_points", cfg.eval.mu_points);
    cfg.eval.stein_literal = e.value("stein_literal", cfg.eval.stein_literal);
  }
  cfg.validate();
  return cfg;
}

std::string BacktestConfig::to_json() const {
  nlohmann::json j;
  j["window"] = window;
  j["coord"] = coords.size() == 2 ? "both" : coord_name(coords[0]);
  std::vector<std::string> names;
  for (ModelId m : models) names.push_back(model_name(m));
  j["models"] = names;
  j["B"] = B;
  j["seed"] = seed;
  j["refit_every"] = refit_every;
  j["threads"] = threads;
  j["eval"] = {{"alpha", eval.alpha},
               {"n_boot", eval.n_boot},
               {"block_len", eval.block_len},
               {"mu_points", eval.mu_points},
               {"stein_literal", eval.stein_literal}};
  return j.dump(2);
}

DataSpec DataSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  DataSpec s;
  s.type = j.value("type", s.type);
  s.assets = j.value("assets", s.assets);
  s.days = j.value("days", s.days);
  s.intervals = j.value("intervals", s.intervals);
  s.noise_sd = j.value("noise_sd", s.noise_sd);
  s.seed = j.value("seed", s.seed);
  s.params.mean_log_var = j.value("mean_log_var", s.params.mean_log_var);
  s.params.kappa = j.value("kappa", s.params.kappa);
  s.params.vol_of_vol = j.value("vol_of_vol", s.params.vol_of_vol);
  s.params.corr = j.value("corr", s.params.corr);
  s.params.drift = j.value("drift", s.params.drift);
  s.estimate = j.value("estimate", s.estimate);
  s.base_step = j.value("base_step", s.base_step);
  s.subgrids = j.value("subgrids", s.subgrids);
  s.path = j.value("path", s.path);
  s.step_seconds = j.value("step_seconds", s.step_seconds);
  s.align_seconds = j.value("align_seconds", s.align_seconds);
  s.returns_path = j.value("returns_path", s.returns_path);
  return s;
}

DataBundle load_data(const DataSpec& spec) {
  DataBundle out;
  if (spec.type == "synthetic") {
    SimulatedData sim = simulate_panel(spec.assets, spec.days, spec.intervals,
                                       spec.params, spec.noise_sd, spec.seed);
    out.assets = sim.panel.assets;
    out.returns = daily_returns(sim.panel);
    if (spec.estimate) {
      out.realized.dates = sim.panel.dates;
      out.realized.mats.resize(sim.panel.n_days());
      for (int d = 0; d < sim.panel.n_days(); ++d)
        out.realized.mats[d] =
            subsampled_realized_cov(sim.panel, d, spec.base_step, spec.subgrids).mat;
    } else {
      out.realized = sim.true_cov;
    }
  } else if (spec.type == "intraday_csv") {
    IntradayPanel panel = read_intraday_csv(spec.path, spec.align_seconds);
    out.assets = panel.assets;
    out.returns = daily_returns(panel);
    const double tick = panel.grid_seconds[1] - panel.grid_seconds[0];
    const int base_step = std::max(1, static_cast<int>(std::lround(spec.step_seconds / tick)));
    out.realized.dates = panel.dates;
    out.realized.mats.resize(panel.n_days());
    for (int d = 0; d < panel.n_days(); ++d)
      out.realized.mats[d] =
          subsampled_realized_cov(panel, d, base_step, spec.subgrids).mat;
  } else if (spec.type == "covariance_csv") {
    out.realized = read_covariance_csv(spec.path);
    const int n = out.realized.dim();
    for (int i = 0; i < n; ++i) out.assets.push_back("A" + std::to_string(i + 1));
    if (!spec.returns_path.empty()) {
      auto [assets, r] = read_daily_returns_csv(spec.returns_path);
      if (static_cast<int>(r.rows()) != out.realized.size())
        throw DataError("returns CSV length does not match covariance series");
      out.assets = assets;
      out.returns = r;
    }
  } else {
    throw DataError("unknown data type '" + spec.type + "'");
  }
  return out;
}

int out_of_sample_count(int total_days, int window) {
  if (window >= total_days)
    throw DataError("window " + std::to_string(window) +
                    " leaves no out-of-sample days (T = " + std::to_string(total_days) + ")");
  return total_days - window;
}

// ---------------------------------------------------------------------------
// Rolling backtest
// ---------------------------------------------------------------------------

namespace {

using HarBank = std::vector<HarModel>;
using FittedModel = std::variant<CopulaForecaster, HarBank, VarfimaModel, DccModel>;

bool is_copula_model(ModelId id) {
  switch (id) {
    case ModelId::dcc:
    case ModelId::har:
    case ModelId::varfima:
      return false;
    default:
      return true;
  }
}

FittedModel fit_model(ModelId id, const VechHistory& h, const Matrix& returns_window,
                      int B, std::uint64_t seed) {
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
    case ModelId::har: {
      HarBank bank;
      for (int j = 0; j < h.width(); ++j) {
        std::vector<double> col(h.length());
        for (int i = 0; i < h.length(); ++i) col[i] = h.series(i, j);
        bank.push_back(har_fit(col));
      }
      return bank;
    }
    case ModelId::varfima:
      return varfima_fit(h.series, std::min(100, h.length() / 2));
    case ModelId::dcc:
      return dcc_fit(returns_window);
  }
  throw NumericError("fit_model: unreachable");
}

Matrix forecast_model(ModelId id, const FittedModel& fitted, const VechHistory& h,
                      const Matrix& returns_through, std::uint64_t forecast_seed) {
  if (is_copula_model(id)) {
    CopulaForecaster f = std::get<CopulaForecaster>(fitted);
    f.seed = forecast_seed;
    return forecast_one(f, h).mat;
  }
  if (id == ModelId::har) {
    const HarBank& bank = std::get<HarBank>(fitted);
    const int m = h.width();
    const int t_len = h.length();
    Vector v(m);
    std::vector<double> recent(22);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < 22; ++i) recent[i] = h.series(t_len - 22 + i, j);
      v[j] = har_forecast(bank[j], recent);
    }
    return reconstruct_spd(VechVector{h.coord, v});
  }
  if (id == ModelId::varfima) {
    const VarfimaModel& mdl = std::get<VarfimaModel>(fitted);
    return reconstruct_spd(VechVector{h.coord, varfima_forecast(mdl, h.series)});
  }
  return dcc_forecast(std::get<DccModel>(fitted), returns_through);
}

struct WorkItem {
  int coord_i;
  int model_i;
  int group;
};

}  // namespace

BacktestRun rolling_backtest(const BacktestConfig& cfg, const DataBundle& data) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const int t_total = data.realized.size();
  const int n_out = out_of_sample_count(t_total, cfg.window);
  const int n = data.realized.dim();
  const int m = vech_size(n);
  const bool have_returns = data.returns.rows() == t_total && data.returns.cols() == n;

  for (ModelId id : cfg.models)
    if (id == ModelId::dcc && !have_returns)
      throw DataError("dcc model requires daily returns aligned with the covariance series");

  BacktestRun run;
  run.config = cfg;
  run.assets = data.assets;
  run.have_returns = have_returns;

  // full-length vech histories per coordinate system
  std::vector<Matrix> vech_full(cfg.coords.size());
  TransformStats xf_stats;
  for (std::size_t c = 0; c < cfg.coords.size(); ++c) {
    Matrix v(t_total, m);
    for (int t = 0; t < t_total; ++t)
      v.row(t) = to_coord(data.realized.mats[t], cfg.coords[c], &xf_stats).values.transpose();
    vech_full[c] = std::move(v);
  }
  if (xf_stats.eigenvalue_clamps > 0)
    log_json("warn", "matrix-log eigenvalue floor applied",
             {{"count", std::to_string(xf_stats.eigenvalue_clamps)}});

  run.realized_out.dates.assign(data.realized.dates.begin() + cfg.window,
                                data.realized.dates.end());
  run.realized_out.mats.assign(data.realized.mats.begin() + cfg.window,
                               data.realized.mats.end());
  if (have_returns) {
    run.expected_returns.resize(n_out, n);
    run.realized_returns_out.resize(n_out, n);
    for (int k = 0; k < n_out; ++k) {
      run.expected_returns.row(k) =
          data.returns.middleRows(k, cfg.window).colwise().mean();
      run.realized_returns_out.row(k) = data.returns.row(k + cfg.window);
    }
  }

  // forecasts indexed [coord][model][day]; empty matrices mark failures
  const int n_models = static_cast<int>(cfg.models.size());
  const int n_groups = (n_out + cfg.refit_every - 1) / cfg.refit_every;
  std::vector<std::vector<std::vector<Matrix>>> fc(
      cfg.coords.size(),
      std::vector<std::vector<Matrix>>(n_models, std::vector<Matrix>(n_out)));

  std::vector<WorkItem> items;
  for (int c = 0; c < static_cast<int>(cfg.coords.size()); ++c)
    for (int mi = 0; mi < n_models; ++mi)
      for (int g = 0; g < n_groups; ++g) items.push_back({c, mi, g});
  std::vector<std::vector<Failure>> item_failures(items.size());

  auto run_item = [&](int it) {
    const WorkItem w = items[static_cast<std::size_t>(it)];
    const ModelId id = cfg.models[w.model_i];
    const Coord coord = cfg.coords[w.coord_i];
    const int k0 = w.group * cfg.refit_every;
    const int k_end = std::min(k0 + cfg.refit_every, n_out);
    const std::uint64_t fit_seed =
        derive_seed(cfg.seed, 0xf17, w.coord_i, w.model_i, w.group);

    FittedModel fitted;
    try {
      VechHistory h_fit{coord, vech_full[w.coord_i].middleRows(k0, cfg.window), {}};
      Matrix returns_window;
      if (id == ModelId::dcc) returns_window = data.returns.middleRows(k0, cfg.window);
      fitted = fit_model(id, h_fit, returns_window, cfg.B, fit_seed);
    } catch (const std::exception& e) {
      for (int k = k0; k < k_end; ++k)
        item_failures[static_cast<std::size_t>(it)].push_back(
            {model_name(id), coord, k, run.realized_out.dates[k],
             std::string("fit: ") + e.what()});
      return;
    }
    for (int k = k0; k < k_end; ++k) {
      try {
        VechHistory h_k{coord, vech_full[w.coord_i].middleRows(k0, cfg.window + k - k0), {}};
        Matrix returns_through;
        if (id == ModelId::dcc)
          returns_through = data.returns.middleRows(k0, cfg.window + k - k0);
        fc[w.coord_i][w.model_i][k] = forecast_model(
            id, fitted, h_k, returns_through, derive_seed(fit_seed, 0xfc, k));
      } catch (const std::exception& e) {
        item_failures[static_cast<std::size_t>(it)].push_back(
            {model_name(id), coord, k, run.realized_out.dates[k],
             std::string("forecast: ") + e.what()});
      }
    }
  };

  const int n_items = static_cast<int>(items.size());
  if (cfg.threads == 1) {
    // serial reference path
    for (int it = 0; it < n_items; ++it) run_item(it);
  } else {
    const int nt = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int it = 0; it < n_items; ++it) run_item(it);
  }
  for (const auto& fs : item_failures)
    run.failures.insert(run.failures.end(), fs.begin(), fs.end());
  std::sort(run.failures.begin(), run.failures.end(), [](const Failure& a, const Failure& b) {
    return std::tie(a.coord, a.model, a.day_index) < std::tie(b.coord, b.model, b.day_index);
  });

  // -------------------------------------------------------------------------
  // Evaluation
  // -------------------------------------------------------------------------
  const SteinOrientation orientation = cfg.eval.stein_literal
                                           ? SteinOrientation::literal_formula
                                           : SteinOrientation::underprediction_penalizing;
  const int block_len = cfg.eval.block_len > 0 ? cfg.eval.block_len
                                               : default_block_len(n_out);

  for (std::size_t c = 0; c < cfg.coords.size(); ++c) {
    CoordResults res;
    res.coord = cfg.coords[c];

    std::vector<std::vector<double>> stein(n_models), frob(n_models), gmvp_var(n_models),
        gmvp_sd_ann(n_models);
    std::vector<std::vector<bool>> present(n_models, std::vector<bool>(n_out, false));

    for (int mi = 0; mi < n_models; ++mi) {
      const std::string name = model_name(cfg.models[mi]);
      CovarianceSeries series;
      series.dates = run.realized_out.dates;
      series.mats.resize(n_out);
      stein[mi].resize(n_out);
      frob[mi].resize(n_out);
      for (int k = 0; k < n_out; ++k) {
        const Matrix& g = fc[c][mi][k];
        series.mats[k] = g;
        if (g.size() == 0) continue;
        present[mi][k] = true;
        frob[mi][k] = frobenius_day_loss(g, run.realized_out.mats[k]);
        stein[mi][k] = stein_loss(g, run.realized_out.mats[k], orientation);
      }
      res.forecasts[name] = std::move(series);
    }

    // economic evaluation needs the GMVP weight paths
    if (have_returns) {
      for (int mi = 0; mi < n_models; ++mi) {
        gmvp_var[mi].resize(n_out);
        gmvp_sd_ann[mi].resize(n_out);
        for (int k = 0; k < n_out; ++k) {
          if (!present[mi][k]) continue;
          GmvpResult sol;
          try {
            sol = gmvp(fc[c][mi][k], run.expected_returns.row(k).transpose(), {});
          } catch (const std::exception& e) {
            sol.feasible = false;
            run.failures.push_back({model_name(cfg.models[mi]), cfg.coords[c], k,
                                    run.realized_out.dates[k],
                                    std::string("gmvp: ") + e.what()});
          }
          if (!sol.feasible) {
            present[mi][k] = false;
            continue;
          }
          const double var = sol.weights.dot(run.realized_out.mats[k] * sol.weights);
          gmvp_var[mi][k] = std::max(0.0, var);
          gmvp_sd_ann[mi][k] = std::sqrt(gmvp_var[mi][k]) * std::sqrt(252.0) * 100.0;
          for (int a = 0; a < n; ++a)
            res.gmvp_paths.push_back({run.realized_out.dates[k], model_name(cfg.models[mi]),
                                      run.assets[a], sol.weights[a]});
        }
      }
    }

    // models entering the confidence sets: coverage >= 95%
    std::vector<int> included;
    for (int mi = 0; mi < n_models; ++mi) {
      const int count = static_cast<int>(std::count(present[mi].begin(), present[mi].end(), true));
      const double coverage = static_cast<double>(count) / n_out;
      ModelEvaluation ev;
      ev.coverage = coverage;
      double racc = 0.0, sacc = 0.0, gacc = 0.0;
      for (int k = 0; k < n_out; ++k) {
        if (!present[mi][k]) continue;
        racc += frob[mi][k];
        sacc += stein[mi][k];
        if (have_returns) gacc += gmvp_sd_ann[mi][k];
      }
      ev.rmse = count > 0 ? racc / count : std::numeric_limits<double>::quiet_NaN();
      ev.mean_stein = count > 0 ? sacc / count : std::numeric_limits<double>::quiet_NaN();
      ev.gmvp_ann_sd =
          have_returns && count > 0 ? gacc / count : std::numeric_limits<double>::quiet_NaN();
      res.eval[model_name(cfg.models[mi])] = ev;
      if (coverage >= 0.95) {
        included.push_back(mi);
      } else {
        log_json("warn", "model excluded from MCS (coverage below 95%)",
                 {{"model", model_name(cfg.models[mi])},
                  {"coord", coord_name(cfg.coords[c])}});
      }
    }

    // intersection of days present for every included model
    std::vector<int> common_days;
    for (int k = 0; k < n_out; ++k) {
      bool all = true;
      for (int mi : included) all = all && present[mi][k];
      if (all) common_days.push_back(k);
    }

    if (included.size() >= 1 && common_days.size() >= 2) {
      std::map<std::string, std::vector<double>> stein_losses;
      for (int mi : included) {
        std::vector<double>& v = stein_losses[model_name(cfg.models[mi])];
        for (int k : common_days) v.push_back(stein[mi][k]);
      }
      res.mcs_stein = mcs(stein_losses, cfg.eval.alpha, cfg.eval.n_boot, block_len,
                          derive_seed(cfg.seed, 0x3c5, c, 1));
      for (int mi : included) {
        const std::string name = model_name(cfg.models[mi]);
        ModelEvaluation& ev = res.eval[name];
        ev.mcs_pvalue = res.mcs_stein.pvalues.at(name);
        ev.in_mcs_stein = std::find(res.mcs_stein.retained.begin(),
                                    res.mcs_stein.retained.end(),
                                    name) != res.mcs_stein.retained.end();
      }
      if (have_returns) {
        std::map<std::string, std::vector<double>> var_losses;
        for (int mi : included) {
          std::vector<double>& v = var_losses[model_name(cfg.models[mi])];
          for (int k : common_days) v.push_back(gmvp_var[mi][k]);
        }
        res.mcs_gmvp = mcs(var_losses, cfg.eval.alpha, cfg.eval.n_boot, block_len,
                           derive_seed(cfg.seed, 0x3c5, c, 2));
        for (int mi : included) {
          const std::string name = model_name(cfg.models[mi]);
          ModelEvaluation& ev = res.eval[name];
          ev.gmvp_mcs_pvalue = res.mcs_gmvp.pvalues.at(name);
          ev.in_mcs_gmvp = std::find(res.mcs_gmvp.retained.begin(),
                                     res.mcs_gmvp.retained.end(),
                                     name) != res.mcs_gmvp.retained.end();
        }
      }
    }

    // frontiers for fully covered models
    if (have_returns) {
      std::map<std::string, CovarianceSeries> full;
      for (int mi = 0; mi < n_models; ++mi) {
        bool complete = true;
        for (int k = 0; k < n_out; ++k) complete = complete && present[mi][k];
        if (complete) full[model_name(cfg.models[mi])] = res.forecasts[model_name(cfg.models[mi])];
      }
      const std::vector<double> grid =
          default_mu_grid(run.expected_returns, cfg.eval.mu_points);
      res.frontier = efficient_frontier(full, run.realized_out, run.expected_returns, grid);
    }

    run.per_coord.emplace_back(cfg.coords[c], std::move(res));
  }

  run.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string report_json(const BacktestRun& run) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(run.config.to_json());
  j["n_forecast_days"] = run.realized_out.size();
  j["wall_seconds"] = run.wall_seconds;
  j["n_failures"] = run.failures.size();
  nlohmann::json coords;
  for (const auto& [coord, res] : run.per_coord) {
    nlohmann::json jc;
    nlohmann::json models;
    for (const auto& [name, ev] : res.eval) {
      nlohmann::json je;
      je["rmse"] = ev.rmse;
      je["mean_stein"] = ev.mean_stein;
      je["in_mcs_stein"] = ev.in_mcs_stein;
      je["mcs_pvalue"] = ev.mcs_pvalue;
      je["coverage"] = ev.coverage;
      if (run.have_returns) {
        je["gmvp_ann_sd"] = ev.gmvp_ann_sd;
        je["in_mcs_gmvp"] = ev.in_mcs_gmvp;
        je["gmvp_mcs_pvalue"] = ev.gmvp_mcs_pvalue;
      }
      models[name] = je;
    }
    jc["models"] = models;
    jc["mcs_stein_retained"] = res.mcs_stein.retained;
    if (run.have_returns) jc["mcs_gmvp_retained"] = res.mcs_gmvp.retained;
    coords[coord_name(coord)] = jc;
  }
  j["coords"] = coords;
  nlohmann::json fails = nlohmann::json::array();
  for (const Failure& f : run.failures) {
    fails.push_back({{"model", f.model},
                     {"coord", coord_name(f.coord)},
                     {"date", f.date},
                     {"message", f.message}});
  }
  j["failures"] = fails;
  return j.dump(2);
}

void write_backtest_outputs(const BacktestRun& run, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> order;
  for (ModelId id : run.config.models) order.push_back(model_name(id));
  for (const auto& [coord, res] : run.per_coord) {
    const std::string suffix = coord_name(coord);
    write_forecast_csv(out_dir + "/forecasts_" + suffix + ".csv", order, res.forecasts);
    if (run.have_returns) {
      write_frontier_csv(out_dir + "/frontier_" + suffix + ".csv", res.frontier);
      write_gmvp_paths_csv(out_dir + "/gmvp_paths_" + suffix + ".csv", res.gmvp_paths);
    }
  }
  std::ofstream rep(out_dir + "/report.json");
  if (!rep) throw DataError("cannot write report.json in " + out_dir);
  rep << report_json(run) << "\n";
}

}  // namespace rvcop
