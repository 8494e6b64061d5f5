#include "rvcop/benchmod.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <string>

#include "rvcop/optim.hpp"

namespace rvcop {

// ---------------------------------------------------------------------------
// HAR
// ---------------------------------------------------------------------------

HarModel har_fit(std::span<const double> series) {
  const int n = static_cast<int>(series.size());
  if (n < 45)
    throw DataError("har_fit: need at least 45 observations (22-lag warmup), got " +
                    std::to_string(n));
  const int rows = n - 22;
  Matrix x(rows, 4);
  Vector y(rows);
  for (int t = 22; t < n; ++t) {
    double w = 0.0, m = 0.0;
    for (int l = 0; l < 5; ++l) w += series[t - 1 - l];
    for (int l = 0; l < 22; ++l) m += series[t - 1 - l];
    const int r = t - 22;
    x(r, 0) = 1.0;
    x(r, 1) = series[t - 1];
    x(r, 2) = w / 5.0;
    x(r, 3) = m / 22.0;
    y[r] = series[t];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4)
    throw NumericError("har_fit: singular design (rank " + std::to_string(qr.rank()) +
                       " < 4); regressors are collinear");
  Vector beta = qr.solve(y);
  const double rss = (y - x * beta).squaredNorm();
  HarModel mdl;
  mdl.beta0 = beta[0];
  mdl.beta_d = beta[1];
  mdl.beta_w = beta[2];
  mdl.beta_m = beta[3];
  mdl.residual_sd = std::sqrt(rss / std::max(1, rows - 4));
  return mdl;
}

double har_forecast(const HarModel& mdl, std::span<const double> recent22) {
  if (recent22.size() != 22)
    throw DataError("har_forecast: expected exactly the last 22 observations, got " +
                    std::to_string(recent22.size()));
  double w = 0.0, m = 0.0;
  for (int l = 0; l < 5; ++l) w += recent22[21 - l];
  for (int l = 0; l < 22; ++l) m += recent22[21 - l];
  return mdl.beta0 + mdl.beta_d * recent22[21] + mdl.beta_w * w / 5.0 + mdl.beta_m * m / 22.0;
}

// ---------------------------------------------------------------------------
// VARFIMA(1,d,1)
// ---------------------------------------------------------------------------

std::vector<double> fracdiff_coeffs(double d, int K) {
  if (K < 1) throw DataError("fracdiff_coeffs: K must be >= 1");
  std::vector<double> pi(K + 1);
  pi[0] = 1.0;
  for (int k = 1; k <= K; ++k) pi[k] = pi[k - 1] * (k - 1 - d) / k;
  return pi;
}

namespace {

// combined AR(infinity) weights of (1 - theta L)^{-1} (1 - phi L)(1 - L)^d,
// truncated at K: residual_t = sum_k w_k (X_{t-k} - c)
std::vector<double> varfima_ar_weights(double d, double phi, double theta, int K) {
  std::vector<double> pi = fracdiff_coeffs(d, K);
  std::vector<double> w(K + 1);
  w[0] = 1.0;
  for (int k = 1; k <= K; ++k) {
    const double a = pi[k] - phi * pi[k - 1];
    w[k] = a + theta * w[k - 1];
  }
  return w;
}

}  // namespace

Matrix varfima_residuals(const Matrix& series, const Vector& c, int trunc, double d,
                         double phi, double theta) {
  const int t_len = static_cast<int>(series.rows());
  const int m = static_cast<int>(series.cols());
  if (trunc < 1 || trunc >= t_len)
    throw DataError("varfima_residuals: trunc must be in [1, T)");
  const Matrix xc = series.rowwise() - c.transpose();
  const std::vector<double> w = varfima_ar_weights(d, phi, theta, trunc);
  const int rows = t_len - trunc;
  Matrix eps = Matrix::Zero(rows, m);
  for (int k = 0; k <= trunc; ++k) eps.noalias() += w[k] * xc.block(trunc - k, 0, rows, m);
  return eps;
}

namespace {

double varfima_rss(const Matrix& xc, int trunc, double d, double phi, double theta) {
  const std::vector<double> w = varfima_ar_weights(d, phi, theta, trunc);
  const int rows = static_cast<int>(xc.rows()) - trunc;
  Matrix eps = Matrix::Zero(rows, xc.cols());
  for (int k = 0; k <= trunc; ++k)
    eps.noalias() += w[k] * xc.block(trunc - k, 0, rows, xc.cols());
  return eps.squaredNorm();
}

}  // namespace

VarfimaModel varfima_fit(const Matrix& series, int trunc) {
  const int t_len = static_cast<int>(series.rows());
  if (trunc < 1 || trunc > t_len / 2)
    throw DataError("varfima_fit: trunc must be in [1, T/2]");
  VarfimaModel mdl;
  mdl.trunc = trunc;
  mdl.c = series.colwise().mean();
  Matrix xc = series.rowwise() - mdl.c.transpose();

  const double d_lo = 0.01, d_hi = 0.49, ar_lim = 0.95;
  auto objective = [&](const std::vector<double>& p) {
    if (p[0] <= d_lo || p[0] >= d_hi || std::fabs(p[1]) >= ar_lim || std::fabs(p[2]) >= ar_lim)
      return std::numeric_limits<double>::infinity();
    return varfima_rss(xc, trunc, p[0], p[1], p[2]);
  };

  // coarse grid, then simplex refinement from the best grid points
  std::vector<std::pair<double, std::vector<double>>> grid;
  for (double d : {0.1, 0.25, 0.4})
    for (double phi : {-0.5, 0.0, 0.5})
      for (double theta : {-0.5, 0.0, 0.5}) {
        std::vector<double> p{d, phi, theta};
        grid.emplace_back(objective(p), p);
      }
  std::sort(grid.begin(), grid.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  NelderMeadResult best;
  for (int s = 0; s < 3 && s < static_cast<int>(grid.size()); ++s) {
    NelderMeadResult r =
        nelder_mead(objective, grid[s].second, {0.05, 0.1, 0.1}, 1e-10, 160);
    if (r.fx < best.fx) best = r;
  }
  if (!std::isfinite(best.fx))
    throw NumericError("varfima_fit: optimizer failed at all starts (trunc=" +
                       std::to_string(trunc) + ", T=" + std::to_string(t_len) + ")");
  mdl.d = best.x[0];
  mdl.phi = best.x[1];
  mdl.theta = best.x[2];
  mdl.rss = best.fx;
  return mdl;
}

Vector varfima_forecast(const VarfimaModel& mdl, const Matrix& series) {
  const int t_len = static_cast<int>(series.rows());
  if (t_len < 1) throw DataError("varfima_forecast: empty history");
  const int k_max = std::min(t_len, mdl.trunc);
  const std::vector<double> w = varfima_ar_weights(mdl.d, mdl.phi, mdl.theta, k_max);
  Vector forecast = mdl.c;
  for (int k = 1; k <= k_max; ++k)
    forecast -= w[k] * (series.row(t_len - k).transpose() - mdl.c);
  return forecast;
}

// ---------------------------------------------------------------------------
// DCC-GARCH(1,1)
// ---------------------------------------------------------------------------

namespace {

double garch_nll(const Vector& eps, double omega, double alpha, double beta) {
  const int t_len = static_cast<int>(eps.size());
  double d = eps.squaredNorm() / t_len;  // initialize at the sample variance
  double nll = 0.0;
  for (int t = 1; t < t_len; ++t) {
    d = omega + alpha * eps[t - 1] * eps[t - 1] + beta * d;
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    nll += 0.5 * (std::log(d) + eps[t] * eps[t] / d);
  }
  return nll;
}

GarchParams garch_fit_1d(const Vector& eps, bool* boundary) {
  const double var = eps.squaredNorm() / eps.size();
  auto objective = [&](const std::vector<double>& p) {
    if (p[0] <= 1e-12 * var || p[1] <= 1e-8 || p[2] <= 1e-8 || p[1] + p[2] >= 0.9999)
      return std::numeric_limits<double>::infinity();
    return garch_nll(eps, p[0], p[1], p[2]);
  };
  NelderMeadResult best;
  for (auto [a0, b0] : {std::pair{0.05, 0.90}, {0.10, 0.80}, {0.02, 0.95}}) {
    std::vector<double> p0{var * (1.0 - a0 - b0), a0, b0};
    NelderMeadResult r = nelder_mead(objective, p0, {0.2 * p0[0], 0.03, 0.03}, 1e-10, 500);
    if (r.fx < best.fx) best = r;
  }
  if (!std::isfinite(best.fx)) throw NumericError("dcc_fit: GARCH(1,1) estimation failed");
  if (best.x[1] + best.x[2] > 0.998 && boundary) *boundary = true;
  return GarchParams{best.x[0], best.x[1], best.x[2]};
}

// conditional-variance path for one asset; returns d_t for t = 0..T-1
Vector garch_path(const Vector& eps, const GarchParams& g) {
  const int t_len = static_cast<int>(eps.size());
  Vector d(t_len);
  d[0] = eps.squaredNorm() / t_len;
  for (int t = 1; t < t_len; ++t)
    d[t] = g.omega + g.alpha * eps[t - 1] * eps[t - 1] + g.beta * d[t - 1];
  return d;
}

double dcc_corr_nll(const Matrix& u, const Matrix& qbar, double t1, double t2) {
  const int t_len = static_cast<int>(u.rows());
  const int n = static_cast<int>(u.cols());
  Matrix q = qbar;
  double nll = 0.0;
  for (int t = 0; t < t_len; ++t) {
    if (t > 0)
      q = (1.0 - t1 - t2) * qbar + t1 * (u.row(t - 1).transpose() * u.row(t - 1)) + t2 * q;
    Vector dq = q.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Matrix r = dq.asDiagonal() * q * dq.asDiagonal();
    Eigen::LLT<Matrix> llt(r);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    const Vector w = llt.matrixL().solve(u.row(t).transpose());
    nll += 0.5 * (logdet + w.squaredNorm());
  }
  return nll;
}

}  // namespace

DccModel dcc_fit(const Matrix& returns) {
  const int t_len = static_cast<int>(returns.rows());
  const int n = static_cast<int>(returns.cols());
  if (t_len < 250)
    throw DataError("dcc_fit: need at least 250 return observations, got " +
                    std::to_string(t_len));
  DccModel mdl;
  mdl.mu = returns.colwise().mean();
  Matrix eps = returns.rowwise() - mdl.mu.transpose();

  Matrix u(t_len, n);
  mdl.garch.resize(n);
  for (int i = 0; i < n; ++i) {
    mdl.garch[i] = garch_fit_1d(eps.col(i), &mdl.boundary);
    Vector d = garch_path(eps.col(i), mdl.garch[i]);
    u.col(i) = eps.col(i).array() / d.array().sqrt();
  }
  mdl.qbar = u.transpose() * u / static_cast<double>(t_len);

  if (n == 1) {
    mdl.theta1 = mdl.theta2 = 0.0;
    return mdl;
  }
  auto objective = [&](const std::vector<double>& p) {
    if (p[0] < 0.0 || p[1] < 0.0 || p[0] + p[1] >= 0.9999)
      return std::numeric_limits<double>::infinity();
    return dcc_corr_nll(u, mdl.qbar, p[0], p[1]);
  };
  NelderMeadResult best;
  for (auto [a0, b0] : {std::pair{0.02, 0.95}, {0.05, 0.90}, {0.01, 0.60}}) {
    NelderMeadResult r = nelder_mead(objective, {a0, b0}, {0.02, 0.05}, 1e-10, 300);
    if (r.fx < best.fx) best = r;
  }
  if (!std::isfinite(best.fx))
    throw NumericError("dcc_fit: correlation quasi-likelihood estimation failed");
  mdl.theta1 = best.x[0];
  mdl.theta2 = best.x[1];
  if (mdl.theta1 + mdl.theta2 > 0.998) mdl.boundary = true;
  return mdl;
}

Matrix dcc_forecast(const DccModel& mdl, const Matrix& returns) {
  const int t_len = static_cast<int>(returns.rows());
  const int n = static_cast<int>(returns.cols());
  if (n != static_cast<int>(mdl.garch.size()))
    throw DataError("dcc_forecast: asset count mismatch");
  Matrix eps = returns.rowwise() - mdl.mu.transpose();

  Vector d_next(n);
  Matrix u(t_len, n);
  for (int i = 0; i < n; ++i) {
    Vector d = garch_path(eps.col(i), mdl.garch[i]);
    u.col(i) = eps.col(i).array() / d.array().sqrt();
    d_next[i] = mdl.garch[i].omega + mdl.garch[i].alpha * eps(t_len - 1, i) * eps(t_len - 1, i) +
                mdl.garch[i].beta * d[t_len - 1];
  }
  Matrix q = mdl.qbar;
  for (int t = 1; t <= t_len; ++t)
    q = (1.0 - mdl.theta1 - mdl.theta2) * mdl.qbar +
        mdl.theta1 * (u.row(t - 1).transpose() * u.row(t - 1)) + mdl.theta2 * q;
  Vector dq = q.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  Matrix r = dq.asDiagonal() * q * dq.asDiagonal();
  Vector vol = d_next.cwiseSqrt();
  return vol.asDiagonal() * r * vol.asDiagonal();
}

}  // namespace rvcop
