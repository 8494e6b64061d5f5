#pragma once

#include <map>
#include <string>
#include <vector>

#include "rvcop/evalkit.hpp"
#include "rvcop/rvest.hpp"

namespace rvcop {

/// Intraday CSV contract: header `timestamp,symbol,logprice`, RFC-3339
/// timestamps, rows sorted by timestamp. If align_seconds > 0, each day is
/// resampled onto a regular grid with previous-tick alignment; otherwise the
/// observed timestamps must form one common grid across days.
IntradayPanel read_intraday_csv(const std::string& path, double align_seconds = 0.0);
void write_intraday_csv(const std::string& path, const IntradayPanel& panel);

/// Covariance-series CSV: header `date,i,j,value`, 1-based indices, upper
/// triangle only.
CovarianceSeries read_covariance_csv(const std::string& path);
void write_covariance_csv(const std::string& path, const CovarianceSeries& series);

/// Forecast CSV: header `date,model,i,j,value`, upper triangle per matrix.
void write_forecast_csv(const std::string& path,
                        const std::vector<std::string>& model_order,
                        const std::map<std::string, CovarianceSeries>& forecasts);
std::map<std::string, CovarianceSeries> read_forecast_csv(const std::string& path);

/// Summary-stats CSV mirroring the descriptive-statistics table layout.
void write_summary_stats_csv(const std::string& path,
                             const std::vector<std::string>& labels,
                             const std::vector<SummaryStats>& stats);

/// Daily-returns CSV: header `date,symbol,return`.
void write_daily_returns_csv(const std::string& path, const IntradayPanel& panel,
                             const Matrix& returns);
std::pair<std::vector<std::string>, Matrix> read_daily_returns_csv(
    const std::string& path, std::vector<std::string>* dates = nullptr);

/// Frontier CSV: `model,mu_p,avg_sd,n_feasible_days`.
void write_frontier_csv(const std::string& path, const std::vector<FrontierPoint>& pts);

/// Rank-correlation CSV: `row,col,rho` (1-based, NaN emitted as empty field).
void write_rank_corr_csv(const std::string& path, const Matrix& rho);

/// GMVP weight-path CSV: `date,model,asset,weight`.
struct GmvpPathRow {
  std::string date, model, asset;
  double weight;
};
void write_gmvp_paths_csv(const std::string& path, const std::vector<GmvpPathRow>& rows);

/// Fixed shortest-roundtrip float formatting shared by all writers, so
/// identical runs produce byte-identical files.
std::string format_double(double v);

/// Line-delimited JSON log record on stderr.
void log_json(const std::string& level, const std::string& msg,
              const std::vector<std::pair<std::string, std::string>>& fields = {});

}  // namespace rvcop
