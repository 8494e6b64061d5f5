#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvcop/benchmod.hpp"
#include "rvcop/copulae.hpp"
#include "rvcop/margins.hpp"
#include "rvcop/matxform.hpp"

namespace rvcop {

/// History of vech coordinates: T rows, m = n(n+1)/2 columns.
struct VechHistory {
  Coord coord;
  Matrix series;
  std::vector<std::string> dates;

  int length() const { return static_cast<int>(series.rows()); }
  int width() const { return static_cast<int>(series.cols()); }
  void validate() const;
};

/// The four copula forecasting approaches:
///   mc1:        one 2m-dimensional copula on (X_{t-1}, X_t)
///   mc2:        m copulas of dimension m+1 on (X_{t-1}, X_{j,t})
///   entry:      m bivariate copulas on (X_{j,t-1}, X_{j,t})
///   copula_har: bivariate copulas on the diagonal coordinates, HAR elsewhere
enum class Approach { mc1, mc2, entry, copula_har };

const char* approach_name(Approach a);

struct CopulaForecaster {
  Approach approach;
  CopulaFamily family;
  Coord coord;
  int m = 0;
  int B = 1000;
  std::uint64_t seed = 0;
  std::vector<EmpiricalMarginal> marginals;  // one per coordinate
  std::vector<CopulaModel> copulas;          // layout depends on approach
  std::vector<int> copula_coords;            // coordinates forecast by copulas
  std::vector<int> har_coords;               // copula_har only
  std::vector<HarModel> har;                 // aligned with har_coords
};

CopulaForecaster fit_mc1(const VechHistory& h, CopulaFamily family, int B,
                         std::uint64_t seed);
CopulaForecaster fit_mc2(const VechHistory& h, CopulaFamily family, int B,
                         std::uint64_t seed);
CopulaForecaster fit_entry(const VechHistory& h, CopulaFamily family, int B,
                           std::uint64_t seed);
CopulaForecaster fit_copula_har(const VechHistory& h, CopulaFamily family, int B,
                                std::uint64_t seed);

struct ForecastResult {
  VechVector vech;
  Matrix mat;
  bool repaired = false;  // Cholesky diagonal sign repair fired
};

/// One-step-ahead forecast: PIT the last observation, draw B conditional
/// copula realizations, inverse-PIT each, average, rebuild the SPD matrix.
ForecastResult forecast_one(const CopulaForecaster& f, const VechHistory& h);

/// Builds the (T-1) x 2m pseudo lag matrix [F(X_{t-1}), F(X_t)] used by the
/// fits and by the rank-correlation diagnostics.
Matrix stacked_lag_pseudo(const VechHistory& h);

}  // namespace rvcop
