#include "rvcop/rvest.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rvcop/dates.hpp"
#include "rvcop/matxform.hpp"
#include "rvcop/rng.hpp"

namespace rvcop {

int IntradayPanel::day_index(const std::string& date) const {
  for (int i = 0; i < n_days(); ++i)
    if (dates[i] == date) return i;
  throw DataError("unknown day '" + date + "'");
}

void IntradayPanel::validate() const {
  if (assets.empty() || dates.empty()) throw DataError("panel: empty assets or dates");
  if (grid_seconds.size() < 2) throw DataError("panel: grid needs at least 2 points");
  for (std::size_t i = 1; i < grid_seconds.size(); ++i)
    if (!(grid_seconds[i] > grid_seconds[i - 1]))
      throw DataError("panel: grid not strictly increasing");
  if (logprices.size() != dates.size()) throw DataError("panel: days/prices mismatch");
  for (const Matrix& p : logprices) {
    if (p.rows() != static_cast<long>(grid_seconds.size()) ||
        p.cols() != static_cast<long>(assets.size()))
      throw DataError("panel: price block shape mismatch");
    if (!p.allFinite()) throw DataError("panel: non-finite log price");
  }
}

Matrix intraday_returns(const IntradayPanel& panel, int day) {
  if (day < 0 || day >= panel.n_days())
    throw DataError("intraday_returns: day index " + std::to_string(day) + " out of range");
  const Matrix& p = panel.logprices[day];
  return p.bottomRows(p.rows() - 1) - p.topRows(p.rows() - 1);
}

RealizedCov realized_cov(const Matrix& returns) {
  const int m = static_cast<int>(returns.rows());
  const int n = static_cast<int>(returns.cols());
  if (m < 1 || n < 1) throw DataError("realized_cov: empty return matrix");
  RealizedCov out;
  out.mat = returns.transpose() * returns;
  out.mat = (out.mat + out.mat.transpose()) / 2.0;
  if (m <= n) {
    out.pd_warning = true;
  } else {
    Eigen::LLT<Matrix> llt(out.mat);
    out.pd_warning = llt.info() != Eigen::Success;
  }
  return out;
}

RealizedCov subsampled_realized_cov(const IntradayPanel& panel, int day, int base_step,
                                    int K) {
  if (K < 1) throw DataError("subsampled_realized_cov: K must be >= 1");
  if (base_step < 1) throw DataError("subsampled_realized_cov: base_step must be >= 1");
  const int m_fine = panel.n_intervals();
  if (base_step * K > m_fine)
    throw DataError("subsampled_realized_cov: base_step*K = " +
                    std::to_string(base_step * K) + " exceeds grid length " +
                    std::to_string(m_fine));
  const Matrix& p = panel.logprices[day];
  const int n = panel.n_assets();
  Matrix acc = Matrix::Zero(n, n);
  bool warn = false;
  for (int k = 0; k < K; ++k) {
    // prices at ticks k, k+base_step, k+2*base_step, ...
    std::vector<int> pts;
    for (int idx = k; idx <= m_fine; idx += base_step) pts.push_back(idx);
    Matrix ret(static_cast<int>(pts.size()) - 1, n);
    for (std::size_t j = 1; j < pts.size(); ++j)
      ret.row(static_cast<int>(j - 1)) = p.row(pts[j]) - p.row(pts[j - 1]);
    RealizedCov rc = realized_cov(ret);
    warn = warn || rc.pd_warning;
    acc += rc.mat;
  }
  return RealizedCov{acc / static_cast<double>(K), warn};
}

// ---------------------------------------------------------------------------
// Synthetic panel
// ---------------------------------------------------------------------------

SimulatedData simulate_panel(int n, int T, int M, const SimParams& params,
                             double noise_sd, std::uint64_t seed) {
  if (n < 1 || T < 30 || M < n + 1)
    throw DataError("simulate_panel: need n >= 1, T >= 30, M >= n+1");

  // Day-boundary log-variance anchors evolve as a daily OU chain; one serial
  // pass so that the per-day simulations below are order-independent.
  Matrix anchors(T + 1, n);
  {
    RngStream rng = RngStream::from(seed, 1);
    for (int i = 0; i < n; ++i) anchors(0, i) = params.mean_log_var;
    for (int d = 1; d <= T; ++d)
      for (int i = 0; i < n; ++i)
        anchors(d, i) = anchors(d - 1, i) +
                        params.kappa * (params.mean_log_var - anchors(d - 1, i)) +
                        params.vol_of_vol * rng.normal();
  }

  Matrix corr = Matrix::Constant(n, n, params.corr);
  corr.diagonal().setOnes();
  Eigen::LLT<Matrix> llt(corr);
  if (llt.info() != Eigen::Success)
    throw DataError("simulate_panel: correlation parameter does not give a PD matrix");
  const Matrix chol = llt.matrixL();

  SimulatedData out;
  out.panel.assets.resize(n);
  for (int i = 0; i < n; ++i) out.panel.assets[i] = "A" + std::to_string(i + 1);
  out.panel.dates.resize(T);
  out.panel.grid_seconds.resize(M + 1);
  const double day_open = 9.5 * 3600.0, day_close = 16.0 * 3600.0;
  for (int j = 0; j <= M; ++j)
    out.panel.grid_seconds[j] = day_open + (day_close - day_open) * j / M;
  out.panel.logprices.resize(T);
  out.true_cov.dates.resize(T);
  out.true_cov.mats.resize(T);

  const double dt = 1.0 / M;
  Matrix day_total(T, n);  // latent total return per day, for stitching
  // days are independent given the anchors; safe to run concurrently
#pragma omp parallel for schedule(static)
  for (int d = 0; d < T; ++d) {
    RngStream rng = RngStream::from(seed, 2, static_cast<std::uint64_t>(d));
    Matrix prices(M + 1, n);
    prices.row(0).setZero();
    Matrix gamma_sum = Matrix::Zero(n, n);
    Vector sigma(n);
    for (int j = 0; j < M; ++j) {
      const double frac = (j + 0.5) / M;
      for (int i = 0; i < n; ++i) {
        const double logvar = anchors(d, i) + frac * (anchors(d + 1, i) - anchors(d, i));
        sigma[i] = std::exp(0.5 * logvar);
      }
      Vector z(n);
      for (int i = 0; i < n; ++i) z[i] = rng.normal();
      const Vector incr = params.drift * dt * Vector::Ones(n) +
                          std::sqrt(dt) * (sigma.asDiagonal() * (chol * z));
      prices.row(j + 1) = prices.row(j) + incr.transpose();
      gamma_sum.noalias() += dt * sigma.asDiagonal() * corr * sigma.asDiagonal();
    }
    day_total.row(d) = prices.row(M);
    if (noise_sd > 0.0) {
      for (int j = 0; j <= M; ++j)
        for (int i = 0; i < n; ++i) prices(j, i) += noise_sd * rng.normal();
    }
    out.panel.logprices[d] = std::move(prices);
    out.true_cov.mats[d] = (gamma_sum + gamma_sum.transpose()) / 2.0;
  }

  // stitch latent price levels so consecutive days are continuous per asset
  Eigen::RowVectorXd offset = Eigen::RowVectorXd::Zero(n);
  for (int d = 0; d < T; ++d) {
    out.panel.logprices[d].rowwise() += offset;
    offset += day_total.row(d);
  }
  // business-day calendar starting 2000-01-03
  std::int64_t serial = days_from_civil(2000, 1, 3);
  for (int d = 0; d < T; ++d) {
    out.panel.dates[d] = iso_date(serial);
    out.true_cov.dates[d] = out.panel.dates[d];
    serial = next_business_day(serial);
  }
  return out;
}

Matrix daily_returns(const IntradayPanel& panel) {
  const int t_len = panel.n_days();
  const int n = panel.n_assets();
  const int last = static_cast<int>(panel.grid_seconds.size()) - 1;
  Matrix r(t_len, n);
  r.row(0) = panel.logprices[0].row(last) - panel.logprices[0].row(0);
  for (int d = 1; d < t_len; ++d)
    r.row(d) = panel.logprices[d].row(last) - panel.logprices[d - 1].row(last);
  return r;
}

// ---------------------------------------------------------------------------
// Summary statistics
// ---------------------------------------------------------------------------

namespace {

// classical rescaled-range estimate over dyadic block sizes
double hurst_rs(std::span<const double> x) {
  const int len = static_cast<int>(x.size());
  std::vector<double> log_size, log_rs;
  for (int s = 8; s <= len / 2; s *= 2) {
    const int blocks = len / s;
    double acc = 0.0;
    int used = 0;
    for (int b = 0; b < blocks; ++b) {
      const double* seg = x.data() + b * s;
      double mean = 0.0;
      for (int i = 0; i < s; ++i) mean += seg[i];
      mean /= s;
      double cum = 0.0, cmin = 0.0, cmax = 0.0, ss = 0.0;
      for (int i = 0; i < s; ++i) {
        cum += seg[i] - mean;
        cmin = std::min(cmin, cum);
        cmax = std::max(cmax, cum);
        ss += (seg[i] - mean) * (seg[i] - mean);
      }
      const double sd = std::sqrt(ss / s);
      if (sd > 0.0) {
        acc += (cmax - cmin) / sd;
        ++used;
      }
    }
    if (used > 0) {
      log_size.push_back(std::log(static_cast<double>(s)));
      log_rs.push_back(std::log(acc / used));
    }
  }
  if (log_size.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const int k = static_cast<int>(log_size.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < k; ++i) {
    mx += log_size[i];
    my += log_rs[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < k; ++i) {
    sxy += (log_size[i] - mx) * (log_rs[i] - my);
    sxx += (log_size[i] - mx) * (log_size[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

SummaryStats summary_stats(std::span<const double> series) {
  const int t_len = static_cast<int>(series.size());
  if (t_len < 2) throw DataError("summary_stats: need at least 2 observations");
  SummaryStats s;
  s.min = s.max = series[0];
  double mean = 0.0;
  for (double v : series) {
    mean += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  mean /= t_len;
  s.mean = mean;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : series) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= t_len;
  m3 /= t_len;
  m4 /= t_len;
  s.std = std::sqrt(m2 * t_len / (t_len - 1));
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);  // raw, Gaussian ~ 3
  } else {
    s.skewness = std::numeric_limits<double>::quiet_NaN();
    s.kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  // the rescaled-range estimate needs at least 32 observations
  s.hurst = t_len >= 32 ? hurst_rs(series) : std::numeric_limits<double>::quiet_NaN();
  return s;
}

std::string vech_label(int k, const std::vector<std::string>& assets) {
  const auto [i, j] = vech_entry(k);
  if (i == j) return assets[i];
  return assets[i] + "-" + assets[j];
}

}  // namespace rvcop
