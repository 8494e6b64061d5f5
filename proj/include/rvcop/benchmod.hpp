#pragma once

#include <span>
#include <vector>

#include "rvcop/common.hpp"

namespace rvcop {

/// Heterogeneous autoregression: today's value on yesterday's value and its
/// 5-day and 22-day trailing means, estimated by OLS.
struct HarModel {
  double beta0 = 0.0;
  double beta_d = 0.0;
  double beta_w = 0.0;
  double beta_m = 0.0;
  double residual_sd = 0.0;
};

HarModel har_fit(std::span<const double> series);
double har_forecast(const HarModel& mdl, std::span<const double> recent22);

/// Binomial expansion of (1-L)^d: pi_0 = 1, pi_k = pi_{k-1} (k-1-d)/k.
std::vector<double> fracdiff_coeffs(double d, int K);

/// Scalar-operator VARFIMA(1,d,1) with a common (d, phi, theta) across the
/// m coordinates and c fixed at the sample mean. Fitted by minimizing the
/// pooled residual sum of squares with truncated filters.
struct VarfimaModel {
  double d = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  Vector c;
  int trunc = 100;
  double rss = 0.0;
};

VarfimaModel varfima_fit(const Matrix& series, int trunc = 100);
Vector varfima_forecast(const VarfimaModel& mdl, const Matrix& series);

/// Truncated-filter residuals for given parameters, rows t = trunc..T-1
/// (so m * (T - trunc) residual values).
Matrix varfima_residuals(const Matrix& series, const Vector& c, int trunc, double d,
                         double phi, double theta);

struct GarchParams {
  double omega = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Two-step DCC-GARCH(1,1): per-asset Gaussian GARCH quasi-likelihoods, then
/// the correlation recursion Q_t = (1-t1-t2) Qbar + t1 u u' + t2 Q_{t-1}.
struct DccModel {
  std::vector<GarchParams> garch;
  double theta1 = 0.0;
  double theta2 = 0.0;
  Matrix qbar;
  Vector mu;
  bool boundary = false;
};

DccModel dcc_fit(const Matrix& returns);
Matrix dcc_forecast(const DccModel& mdl, const Matrix& returns);

}  // namespace rvcop
