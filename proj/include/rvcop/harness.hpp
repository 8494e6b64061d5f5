#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rvcop/evalkit.hpp"
#include "rvcop/fcopula.hpp"
#include "rvcop/io.hpp"
#include "rvcop/rvest.hpp"

namespace rvcop {

/// The thirteen models of the study: three benchmarks, four multivariate
/// copulas, three entrywise bivariate copulas, three copula-HAR hybrids.
enum class ModelId {
  dcc, har, varfima,
  t1, t2, cl1, cl2,
  entry_t, entry_gb, entry_cl,
  t_har, gb_har, cl_har,
};

const char* model_name(ModelId id);
ModelId model_from_name(const std::string& name);
std::vector<ModelId> all_models();

struct EvalOptions {
  double alpha = 0.05;
  int n_boot = 999;
  int block_len = 0;  // 0 = ceil(T_out^{1/3})
  int mu_points = 40;
  bool stein_literal = false;  // literal-formula Stein orientation
};

struct BacktestConfig {
  int window = 600;
  std::vector<Coord> coords{Coord::cholesky};
  std::vector<ModelId> models = all_models();
  int B = 1000;
  std::uint64_t seed = 1;
  int refit_every = 1;
  int threads = 0;  // 0 = OpenMP default, 1 = serial reference path
  EvalOptions eval;

  void validate() const;
  static BacktestConfig from_json(const std::string& text);
  std::string to_json() const;
};

/// Where the realized covariance series comes from.
struct DataSpec {
  std::string type = "synthetic";  // synthetic | intraday_csv | covariance_csv
  // synthetic
  int assets = 6;
  int days = 900;
  int intervals = 78;
  double noise_sd = 0.0;
  std::uint64_t seed = 99;
  SimParams params;
  bool estimate = true;      // estimate from the panel (vs. the true covariances)
  int base_step = 1;         // estimation grid spacing in ticks
  int subgrids = 1;          // K
  // intraday_csv
  std::string path;
  double step_seconds = 300.0;
  double align_seconds = 0.0;
  // covariance_csv
  std::string returns_path;  // optional daily-returns CSV

  static DataSpec from_json(const std::string& text);
};

struct DataBundle {
  CovarianceSeries realized;
  Matrix returns;  // T x n daily log returns; 0x0 when unavailable
  std::vector<std::string> assets;
};

DataBundle load_data(const DataSpec& spec);

/// T - window out-of-sample forecasts; throws when nothing is out of sample.
int out_of_sample_count(int total_days, int window);

struct ModelEvaluation {
  double rmse = 0.0;
  double mean_stein = 0.0;
  bool in_mcs_stein = false;
  double mcs_pvalue = 0.0;
  double coverage = 1.0;
  bool in_mcs_gmvp = false;
  double gmvp_mcs_pvalue = 0.0;
  double gmvp_ann_sd = 0.0;  // mean annualized realized GMVP sd, percent
};

struct CoordResults {
  Coord coord = Coord::cholesky;
  std::map<std::string, CovarianceSeries> forecasts;
  std::map<std::string, ModelEvaluation> eval;
  McsResult mcs_stein;
  McsResult mcs_gmvp;
  std::vector<FrontierPoint> frontier;
  std::vector<GmvpPathRow> gmvp_paths;
};

struct Failure {
  std::string model;
  Coord coord = Coord::cholesky;
  int day_index = 0;
  std::string date;
  std::string message;
};

struct BacktestRun {
  BacktestConfig config;
  std::vector<std::string> assets;
  CovarianceSeries realized_out;   // aligned with the forecasts
  Matrix expected_returns;         // n_out x n in-window mean returns
  Matrix realized_returns_out;     // n_out x n next-day returns
  bool have_returns = false;
  std::vector<std::pair<Coord, CoordResults>> per_coord;
  std::vector<Failure> failures;
  double wall_seconds = 0.0;
};

/// Rolling one-step-ahead backtest: for each out-of-sample day, fit every
/// configured model on the trailing window and forecast the next day, then
/// evaluate. Deterministic under cfg.seed for any thread count; threads == 1
/// selects a plain serial loop kept as the reference implementation.
BacktestRun rolling_backtest(const BacktestConfig& cfg, const DataBundle& data);

std::string report_json(const BacktestRun& run);
void write_backtest_outputs(const BacktestRun& run, const std::string& out_dir);

}  // namespace rvcop
