#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rvcop/harness.hpp"
#include "test_support.hpp"

using namespace rvcop;

namespace {

DataBundle small_synthetic(int assets, int days, std::uint64_t seed) {
  DataSpec spec;
  spec.type = "synthetic";
  spec.assets = assets;
  spec.days = days;
  spec.intervals = 30;
  spec.noise_sd = 0.0;
  spec.seed = seed;
  return load_data(spec);
}

bool forecasts_equal(const BacktestRun& a, const BacktestRun& b) {
  if (a.per_coord.size() != b.per_coord.size()) return false;
  for (std::size_t c = 0; c < a.per_coord.size(); ++c) {
    const auto& fa = a.per_coord[c].second.forecasts;
    const auto& fb = b.per_coord[c].second.forecasts;
    if (fa.size() != fb.size()) return false;
    for (const auto& [name, series] : fa) {
      const auto& other = fb.at(name);
      if (other.size() != series.size()) return false;
      for (int t = 0; t < series.size(); ++t) {
        if (series.mats[t].size() != other.mats[t].size()) return false;
        if (series.mats[t].size() > 0 &&
            (series.mats[t].array() != other.mats[t].array()).any())
          return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("out-of-sample counts match the study design") {
  CHECK(out_of_sample_count(2156, 1508) == 648);
  CHECK(out_of_sample_count(2156, 1000) == 1156);
  CHECK_THROWS_AS(out_of_sample_count(500, 500), DataError);
}

TEST_CASE("model registry covers the thirteen models") {
  CHECK(all_models().size() == 13);
  for (ModelId id : all_models()) CHECK(model_from_name(model_name(id)) == id);
  CHECK_THROWS_AS(model_from_name("nope"), DataError);
}

TEST_CASE("config JSON round trip and validation") {
  BacktestConfig cfg;
  cfg.window = 200;
  cfg.coords = {Coord::cholesky, Coord::logmatrix};
  cfg.models = {ModelId::har, ModelId::t1};
  cfg.B = 123;
  cfg.seed = 77;
  const BacktestConfig back = BacktestConfig::from_json(cfg.to_json());
  CHECK(back.window == 200);
  CHECK(back.coords.size() == 2);
  CHECK(back.models == cfg.models);
  CHECK(back.B == 123);
  CHECK(back.seed == 77);

  const BacktestConfig all = BacktestConfig::from_json(
      R"({"window": 100, "coord": "cholesky", "models": ["all"]})");
  CHECK(all.models.size() == 13);
  CHECK_THROWS_AS(BacktestConfig::from_json(R"({"window": 10})"), DataError);
  CHECK_THROWS_AS(BacktestConfig::from_json(R"({"window": 100, "models": []})"),
                  DataError);
}

TEST_CASE("synthetic data loading with estimation and true covariances") {
  DataSpec spec;
  spec.type = "synthetic";
  spec.assets = 2;
  spec.days = 40;
  spec.intervals = 26;
  spec.seed = 5;
  spec.estimate = true;
  const DataBundle est = load_data(spec);
  CHECK(est.realized.size() == 40);
  CHECK(est.realized.dim() == 2);
  CHECK(est.returns.rows() == 40);
  spec.estimate = false;
  const DataBundle truth = load_data(spec);
  CHECK(truth.realized.size() == 40);
  // estimates differ from the true integrated covariances
  CHECK((est.realized.mats[0] - truth.realized.mats[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rolling backtest produces T - window SPD forecasts per model") {
  const DataBundle data = small_synthetic(2, 160, 31);
  BacktestConfig cfg;
  cfg.window = 120;
  cfg.coords = {Coord::cholesky, Coord::logmatrix};
  cfg.models = {ModelId::har, ModelId::entry_t, ModelId::cl_har};
  cfg.B = 100;
  cfg.seed = 9;
  cfg.eval.n_boot = 99;
  const BacktestRun run = rolling_backtest(cfg, data);
  CHECK(run.realized_out.size() == 40);
  CHECK(run.failures.empty());
  for (const auto& [coord, res] : run.per_coord) {
    for (const auto& [name, series] : res.forecasts) {
      CHECK(series.size() == 40);
      for (const Matrix& g : series.mats) {
        REQUIRE(g.size() > 0);
        Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
      }
    }
    for (const auto& [name, ev] : res.eval) {
      CHECK(ev.coverage == doctest::Approx(1.0));
      CHECK(std::isfinite(ev.rmse));
      CHECK(std::isfinite(ev.mean_stein));
      CHECK(ev.mean_stein >= 0.0);
    }
    CHECK_FALSE(res.mcs_stein.retained.empty());
    CHECK_FALSE(res.frontier.empty());
    CHECK_FALSE(res.gmvp_paths.empty());
  }
}

TEST_CASE("serial reference and openmp paths produce identical runs") {
  const DataBundle data = small_synthetic(2, 140, 32);
  BacktestConfig cfg;
  cfg.window = 120;
  cfg.coords = {Coord::cholesky};
  cfg.models = {ModelId::har, ModelId::entry_gb, ModelId::t2};
  cfg.B = 80;
  cfg.seed = 10;
  cfg.eval.n_boot = 99;
  cfg.threads = 1;  // serial reference
  const BacktestRun serial = rolling_backtest(cfg, data);
  cfg.threads = 2;
  const BacktestRun parallel = rolling_backtest(cfg, data);
  cfg.threads = 0;  // library default
  const BacktestRun dflt = rolling_backtest(cfg, data);
  CHECK(forecasts_equal(serial, parallel));
  CHECK(forecasts_equal(serial, dflt));
  // evaluation numbers agree as well
  const auto& es = serial.per_coord[0].second.eval;
  const auto& ep = parallel.per_coord[0].second.eval;
  for (const auto& [name, ev] : es) {
    CHECK(ev.rmse == doctest::Approx(ep.at(name).rmse));
    CHECK(ev.mean_stein == doctest::Approx(ep.at(name).mean_stein));
  }
}

TEST_CASE("forecasts never look past their target date") {
  const DataBundle data = small_synthetic(2, 150, 33);
  BacktestConfig cfg;
  cfg.window = 120;
  cfg.coords = {Coord::cholesky};
  cfg.models = {ModelId::har, ModelId::entry_cl};
  cfg.B = 60;
  cfg.seed = 11;
  cfg.eval.n_boot = 99;
  const BacktestRun base = rolling_backtest(cfg, data);

  // corrupt everything from day 140 on; forecasts for earlier targets must
  // be bit-identical
  DataBundle tampered = data;
  for (int t = 140; t < 150; ++t) {
    tampered.realized.mats[t] *= 7.0;
    tampered.returns.row(t).array() += 0.05;
  }
  const BacktestRun run2 = rolling_backtest(cfg, tampered);
  for (const auto& [name, series] : base.per_coord[0].second.forecasts) {
    const auto& other = run2.per_coord[0].second.forecasts.at(name);
    for (int k = 0; k + 120 < 140; ++k)
      CHECK((series.mats[k].array() == other.mats[k].array()).all());
  }
}

TEST_CASE("fit failures are skipped, logged, and excluded from the MCS") {
  // constant covariance series: HAR hits a singular design every day,
  // VARFIMA still works (flat objective, forecast = mean)
  DataBundle data;
  Matrix g(1, 1);
  g << 2.0;
  for (int t = 0; t < 60; ++t) {
    data.realized.dates.push_back("d" + std::to_string(t));
    data.realized.mats.push_back(g);
  }
  data.assets = {"A1"};
  BacktestConfig cfg;
  cfg.window = 46;
  cfg.coords = {Coord::cholesky};
  cfg.models = {ModelId::har, ModelId::varfima};
  cfg.seed = 12;
  cfg.eval.n_boot = 99;
  const BacktestRun run = rolling_backtest(cfg, data);
  CHECK(run.realized_out.size() == 14);
  CHECK(run.failures.size() == 14);  // every HAR day
  for (const Failure& f : run.failures) CHECK(f.model == "har");
  const auto& res = run.per_coord[0].second;
  CHECK(res.eval.at("har").coverage == doctest::Approx(0.0));
  CHECK(res.eval.at("varfima").coverage == doctest::Approx(1.0));
  CHECK(res.mcs_stein.retained == std::vector<std::string>{"varfima"});
}

TEST_CASE("dcc joins the backtest once the window covers its minimum") {
  const DataBundle data = small_synthetic(2, 280, 39);
  BacktestConfig cfg;
  cfg.window = 250;
  cfg.coords = {Coord::cholesky};
  cfg.models = {ModelId::dcc, ModelId::har};
  cfg.seed = 21;
  cfg.eval.n_boot = 99;
  const BacktestRun run = rolling_backtest(cfg, data);
  CHECK(run.failures.empty());
  CHECK(run.per_coord[0].second.forecasts.at("dcc").size() == 30);
  for (const Matrix& g : run.per_coord[0].second.forecasts.at("dcc").mats) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("dcc without returns is rejected up front") {
  DataBundle data = small_synthetic(2, 140, 34);
  data.returns.resize(0, 0);
  BacktestConfig cfg;
  cfg.window = 120;
  cfg.models = {ModelId::dcc};
  CHECK_THROWS_AS(rolling_backtest(cfg, data), DataError);
}

TEST_CASE("refit cadence keeps results deterministic") {
  const DataBundle data = small_synthetic(2, 150, 35);
  BacktestConfig cfg;
  cfg.window = 120;
  cfg.coords = {Coord::cholesky};
  cfg.models = {ModelId::entry_t};
  cfg.B = 60;
  cfg.seed = 13;
  cfg.refit_every = 5;
  cfg.eval.n_boot = 99;
  cfg.threads = 1;
  const BacktestRun a = rolling_backtest(cfg, data);
  cfg.threads = 2;
  const BacktestRun b = rolling_backtest(cfg, data);
  CHECK(forecasts_equal(a, b));
  CHECK(a.per_coord[0].second.forecasts.at("entry-t").size() == 30);
}

TEST_CASE("backtest outputs land on disk with the documented names") {
  const DataBundle data = small_synthetic(2, 140, 36);
  BacktestConfig cfg;
  cfg.window = 120;
  cfg.coords = {Coord::cholesky};
  cfg.models = {ModelId::har, ModelId::entry_t};
  cfg.B = 50;
  cfg.seed = 14;
  cfg.eval.n_boot = 99;
  const BacktestRun run = rolling_backtest(cfg, data);
  const std::string dir =
      (std::filesystem::temp_directory_path() / "rvcop_test_out").string();
  std::filesystem::remove_all(dir);
  write_backtest_outputs(run, dir);
  CHECK(std::filesystem::exists(dir + "/forecasts_cholesky.csv"));
  CHECK(std::filesystem::exists(dir + "/report.json"));
  CHECK(std::filesystem::exists(dir + "/frontier_cholesky.csv"));
  CHECK(std::filesystem::exists(dir + "/gmvp_paths_cholesky.csv"));
  const auto back = read_forecast_csv(dir + "/forecasts_cholesky.csv");
  CHECK(back.size() == 2);
  CHECK(back.at("har").size() == 20);
  // report mentions both models
  std::ifstream rep(dir + "/report.json");
  std::string text((std::istreambuf_iterator<char>(rep)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"har\"") != std::string::npos);
  CHECK(text.find("\"entry-t\"") != std::string::npos);
  CHECK(text.find("in_mcs_stein") != std::string::npos);
}

TEST_CASE("cli smoke: simulate, estimate, stats, backtest, exit codes") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "rvcop_test_cli").string();
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = (fs::current_path() / "rvcop").string();
  if (!fs::exists(cli)) {
    MESSAGE("cli binary not found next to the test binary; skipping");
    return;
  }
  auto run = [&](const std::string& args) {
    return std::system((cli + " " + args + " >/dev/null 2>>" + dir + "/log").c_str());
  };
  // byte-identical simulation under one seed
  CHECK(run("simulate --assets 2 --days 100 --intervals 26 --seed 7 --out-prefix " +
            dir + "/a") == 0);
  CHECK(run("simulate --assets 2 --days 100 --intervals 26 --seed 7 --out-prefix " +
            dir + "/b") == 0);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  CHECK(slurp(dir + "/a_intraday.csv") == slurp(dir + "/b_intraday.csv"));
  CHECK(slurp(dir + "/a_truecov.csv") == slurp(dir + "/b_truecov.csv"));

  // estimate with K = 1 equals the plain realized covariance at the base step
  // (26 intervals over 6.5 hours are 15-minute ticks, so 30min = 2 ticks)
  CHECK(run("estimate --input " + dir + "/a_intraday.csv --step 30min --subgrids 1 --out " +
            dir + "/cov1.csv") == 0);
  const CovarianceSeries cov = read_covariance_csv(dir + "/cov1.csv");
  const IntradayPanel panel = read_intraday_csv(dir + "/a_intraday.csv");
  const Matrix direct = subsampled_realized_cov(panel, 3, 2, 1).mat;
  CHECK((cov.mats[3] - direct).cwiseAbs().maxCoeff() < 1e-15);

  CHECK(run("stats --input " + dir + "/cov1.csv --coord cholesky --out " + dir +
            "/stats.csv") == 0);
  CHECK(fs::exists(dir + "/stats.csv"));
  CHECK(run("heatmap-data --input " + dir + "/cov1.csv --out " + dir + "/rho.csv") == 0);

  // fit / forecast split
  CHECK(run("fit --input " + dir + "/cov1.csv --model entry-t --window 0 --B 100 "
            "--seed 3 --out " + dir + "/model.json") == 0);
  CHECK(run("forecast --input " + dir + "/cov1.csv --model-file " + dir +
            "/model.json --out " + dir + "/fc.csv") == 0);
  CHECK(fs::exists(dir + "/fc.csv"));

  // usage error -> 1, data error -> 2
  CHECK(run("estimate") != 0);
  const int usage = std::system((cli + " estimate >/dev/null 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(usage) == 1);
  const int missing = std::system(
      (cli + " estimate --input /nonexistent.csv >/dev/null 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(missing) == 2);

  // a small config-driven backtest over the estimated covariance series
  {
    std::ofstream cfgf(dir + "/run.json");
    cfgf << R"({"window": 60, "coord": "cholesky",
                "models": ["har", "entry-t"], "B": 50, "seed": 4,
                "eval": {"n_boot": 99},
                "data": {"type": "covariance_csv", "path": ")" << dir
         << R"(/cov1.csv", "returns_path": ")" << dir << R"(/a_returns.csv"}})";
  }
  CHECK(run("backtest --config " + dir + "/run.json --out-dir " + dir + "/bt") == 0);
  CHECK(fs::exists(dir + "/bt/report.json"));
  CHECK(fs::exists(dir + "/bt/forecasts_cholesky.csv"));

  // report / frontier from the emitted files
  CHECK(run("report --forecasts " + dir + "/bt/forecasts_cholesky.csv --realized " +
            dir + "/cov1.csv --n-boot 99 --out " + dir + "/rep.json") == 0);
  CHECK(fs::exists(dir + "/rep.json"));
  CHECK(run("frontier --forecasts " + dir + "/bt/forecasts_cholesky.csv --realized " +
            dir + "/cov1.csv --returns " + dir + "/a_returns.csv --points 5 --out " +
            dir + "/front.csv") == 0);
  CHECK(fs::exists(dir + "/front.csv"));
}
