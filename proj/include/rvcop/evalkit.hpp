#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rvcop/fcopula.hpp"
#include "rvcop/rvest.hpp"

namespace rvcop {

/// Mean over days of sqrt(sum of squared upper-triangle errors, diagonal
/// included) -- the upper triangle only, not the full Frobenius norm.
double frobenius_rmse(const CovarianceSeries& forecasts, const CovarianceSeries& realized);

/// Per-day root sum of squared upper-triangle errors (the quantity averaged
/// by frobenius_rmse).
double frobenius_day_loss(const Matrix& forecast, const Matrix& realized);

enum class SteinOrientation {
  /// tr(realized forecast^{-1}) - ln det(realized forecast^{-1}) - n.
  /// Penalizes underprediction more; the default.
  underprediction_penalizing,
  /// tr(forecast realized^{-1}) - ln det(forecast realized^{-1}) - n,
  /// the formula as displayed with hats on the first factor.
  literal_formula,
};

double stein_loss(const Matrix& forecast, const Matrix& realized,
                  SteinOrientation orientation = SteinOrientation::underprediction_penalizing);

struct McsResult {
  std::vector<std::string> retained;           // models in the level-alpha MCS
  std::vector<std::string> elimination_order;  // worst first
  std::map<std::string, double> pvalues;       // running-maximum MCS p-values
  double alpha = 0.05;
  int n_boot = 999;
  int block_len = 0;
};

/// Model confidence set with the range statistic and a circular block
/// bootstrap for the variances of the mean loss differentials.
McsResult mcs(const std::map<std::string, std::vector<double>>& losses, double alpha,
              int n_boot, int block_len, std::uint64_t seed);

int default_block_len(int t_out);

struct GmvpResult {
  Vector weights;
  std::optional<double> mu_p;
  bool feasible = true;
  double forecast_sd = 0.0;  // sqrt(w' forecast w)
};

/// Long-only minimum-variance weights under full investment, optionally with
/// an expected-return equality constraint. Active-set iteration on the KKT
/// system; deterministic lowest-index pivoting.
GmvpResult gmvp(const Matrix& forecast, const Vector& expected_returns,
                std::optional<double> mu_p);

/// Largest KKT residual of a solution (stationarity + feasibility), for tests.
double gmvp_kkt_residual(const Matrix& forecast, const Vector& expected_returns,
                         std::optional<double> mu_p, const Vector& weights);

struct FrontierPoint {
  std::string model;
  double mu_p = 0.0;
  double avg_sd = 0.0;      // average realized sd over feasible days
  int n_feasible_days = 0;
};

/// Ex-post efficient frontiers: for each model, each target return, and each
/// day, solve the GMVP with the model's forecast and record the realized sd
/// sqrt(w' realized w). "oracle" rows use the realized matrix as forecast.
std::vector<FrontierPoint> efficient_frontier(
    const std::map<std::string, CovarianceSeries>& forecasts,
    const CovarianceSeries& realized, const Matrix& expected_returns,
    const std::vector<double>& mu_grid);

/// Default grid: points evenly spaced between the 10th and 90th percentile of
/// the pooled per-day expected returns.
std::vector<double> default_mu_grid(const Matrix& expected_returns, int points = 40);

/// Spearman rank correlation of the columns of the stacked lag matrix
/// (X_{t-1}, X_t); 2m x 2m, NaN where a column is constant.
Matrix rank_corr_matrix(const VechHistory& h);

}  // namespace rvcop
