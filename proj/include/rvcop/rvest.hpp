#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rvcop/common.hpp"

namespace rvcop {

/// Intraday log-price panel: T days, each observed on the same grid of M+1
/// timestamps (seconds since midnight), n assets. Returns are first
/// differences along the grid.
struct IntradayPanel {
  std::vector<std::string> assets;
  std::vector<std::string> dates;
  std::vector<double> grid_seconds;   // M+1 strictly increasing times
  std::vector<Matrix> logprices;      // per day: (M+1) x n

  int n_assets() const { return static_cast<int>(assets.size()); }
  int n_days() const { return static_cast<int>(dates.size()); }
  int n_intervals() const { return static_cast<int>(grid_seconds.size()) - 1; }
  int day_index(const std::string& date) const;
  void validate() const;
};

struct CovarianceSeries {
  std::vector<std::string> dates;
  std::vector<Matrix> mats;
  int dim() const { return mats.empty() ? 0 : static_cast<int>(mats.front().rows()); }
  int size() const { return static_cast<int>(mats.size()); }
};

/// M x n matrix of intraday returns for one day.
Matrix intraday_returns(const IntradayPanel& panel, int day);

struct RealizedCov {
  Matrix mat;
  bool pd_warning = false;  // M <= n or numerically singular
};

/// Sum of outer products of the return rows.
RealizedCov realized_cov(const Matrix& returns);

/// Average of K realized-covariance estimates over subgrids spaced base_step
/// finest ticks apart, offset by 0..K-1 ticks.
RealizedCov subsampled_realized_cov(const IntradayPanel& panel, int day, int base_step,
                                    int K);

/// Synthetic generator parameters. The model is a mean-reverting log-variance
/// anchor process at daily scale per asset, deterministic interpolation within
/// the day, constant cross-correlation of the driving Brownian motions, and
/// additive i.i.d. Gaussian observation noise.
struct SimParams {
  double mean_log_var = -9.0;   // exp(-9) ~ (1.1% daily vol)^2
  double kappa = 0.05;          // daily mean reversion of the log-variance
  double vol_of_vol = 0.25;     // sd of daily log-variance innovations
  double corr = 0.4;            // equicorrelation of the return drivers
  double drift = 0.0;           // per-day drift of log prices
};

struct SimulatedData {
  IntradayPanel panel;
  CovarianceSeries true_cov;
};

SimulatedData simulate_panel(int n, int T, int M, const SimParams& params,
                             double noise_sd, std::uint64_t seed);

/// Close-to-close daily log returns from the panel (first day open-to-close).
Matrix daily_returns(const IntradayPanel& panel);

struct SummaryStats {
  double mean = 0.0, max = 0.0, min = 0.0, std = 0.0;
  double skewness = 0.0, kurtosis = 0.0;  // kurtosis raw (Gaussian ~ 3); NaN if undefined
  double hurst = 0.0;
};

/// Moments plus a rescaled-range Hurst estimate over dyadic block sizes.
SummaryStats summary_stats(std::span<const double> series);

/// Label for vech coordinate k given asset names: "AXP" on the diagonal,
/// "AXP-C" off it.
std::string vech_label(int k, const std::vector<std::string>& assets);

}  // namespace rvcop
