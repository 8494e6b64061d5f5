#include "rvcop/fcopula.hpp"

#include <cmath>

#include "rvcop/rng.hpp"

namespace rvcop {

void VechHistory::validate() const {
  if (length() < 30) throw DataError("VechHistory: need T >= 30 observations");
  vech_dim(width());
  if (!series.allFinite()) throw DataError("VechHistory: non-finite entry");
}

const char* approach_name(Approach a) {
  switch (a) {
    case Approach::mc1: return "mc1";
    case Approach::mc2: return "mc2";
    case Approach::entry: return "entry";
    case Approach::copula_har: return "copula_har";
  }
  return "?";
}

namespace {

std::vector<EmpiricalMarginal> fit_marginals(const Matrix& series) {
  const int m = static_cast<int>(series.cols());
  std::vector<EmpiricalMarginal> out;
  out.reserve(m);
  for (int j = 0; j < m; ++j) {
    std::vector<double> col(series.rows());
    for (int i = 0; i < series.rows(); ++i) col[i] = series(i, j);
    out.emplace_back(std::move(col));
  }
  return out;
}

Matrix pit_columns(const Matrix& series, const std::vector<EmpiricalMarginal>& marg) {
  Matrix u(series.rows(), series.cols());
  for (int j = 0; j < series.cols(); ++j)
    for (int i = 0; i < series.rows(); ++i) u(i, j) = marg[j].cdf(series(i, j));
  return u;
}

void require_family(Approach a, CopulaFamily family) {
  const bool ok = (a == Approach::mc1 || a == Approach::mc2)
                      ? (family == CopulaFamily::t || family == CopulaFamily::clayton)
                      : true;
  if (!ok)
    throw DataError(std::string("approach ") + approach_name(a) +
                    " supports t and clayton families only");
}

void require_length_t(const VechHistory& h, int copula_dim) {
  if (h.length() - 1 < 10 * copula_dim)
    throw DataError("insufficient history for a " + std::to_string(copula_dim) +
                    "-dimensional t copula: need T >= " +
                    std::to_string(10 * copula_dim + 1) + ", got " +
                    std::to_string(h.length()));
}

}  // namespace

Matrix stacked_lag_pseudo(const VechHistory& h) {
  h.validate();
  const auto marg = fit_marginals(h.series);
  const Matrix u = pit_columns(h.series, marg);
  const int t_len = h.length(), m = h.width();
  Matrix stacked(t_len - 1, 2 * m);
  stacked.leftCols(m) = u.topRows(t_len - 1);
  stacked.rightCols(m) = u.bottomRows(t_len - 1);
  return stacked;
}

CopulaForecaster fit_mc1(const VechHistory& h, CopulaFamily family, int B,
                         std::uint64_t seed) {
  h.validate();
  require_family(Approach::mc1, family);
  const int m = h.width();
  if (family == CopulaFamily::t) require_length_t(h, 2 * m);

  CopulaForecaster f;
  f.approach = Approach::mc1;
  f.family = family;
  f.coord = h.coord;
  f.m = m;
  f.B = B;
  f.seed = seed;
  f.marginals = fit_marginals(h.series);
  const Matrix u = pit_columns(h.series, f.marginals);
  const int t_len = h.length();
  Matrix stacked(t_len - 1, 2 * m);
  stacked.leftCols(m) = u.topRows(t_len - 1);
  stacked.rightCols(m) = u.bottomRows(t_len - 1);
  FitOptions opts;
  opts.rank_grid = t_len;
  f.copulas.push_back(fit_copula(family, stacked, opts));
  for (int j = 0; j < m; ++j) f.copula_coords.push_back(j);
  return f;
}

CopulaForecaster fit_mc2(const VechHistory& h, CopulaFamily family, int B,
                         std::uint64_t seed) {
  h.validate();
  require_family(Approach::mc2, family);
  const int m = h.width();
  if (family == CopulaFamily::t) require_length_t(h, m + 1);

  CopulaForecaster f;
  f.approach = Approach::mc2;
  f.family = family;
  f.coord = h.coord;
  f.m = m;
  f.B = B;
  f.seed = seed;
  f.marginals = fit_marginals(h.series);
  const Matrix u = pit_columns(h.series, f.marginals);
  const int t_len = h.length();
  FitOptions opts;
  opts.rank_grid = t_len;
  Matrix block(t_len - 1, m + 1);
  block.leftCols(m) = u.topRows(t_len - 1);
  for (int j = 0; j < m; ++j) {
    block.col(m) = u.col(j).tail(t_len - 1);
    f.copulas.push_back(fit_copula(family, block, opts));
    f.copula_coords.push_back(j);
  }
  return f;
}

CopulaForecaster fit_entry(const VechHistory& h, CopulaFamily family, int B,
                           std::uint64_t seed) {
  h.validate();
  const int m = h.width();
  if (family == CopulaFamily::t) require_length_t(h, 2);

  CopulaForecaster f;
  f.approach = Approach::entry;
  f.family = family;
  f.coord = h.coord;
  f.m = m;
  f.B = B;
  f.seed = seed;
  f.marginals = fit_marginals(h.series);
  const Matrix u = pit_columns(h.series, f.marginals);
  const int t_len = h.length();
  FitOptions opts;
  opts.rank_grid = t_len;
  Matrix pair(t_len - 1, 2);
  for (int j = 0; j < m; ++j) {
    pair.col(0) = u.col(j).head(t_len - 1);
    pair.col(1) = u.col(j).tail(t_len - 1);
    f.copulas.push_back(fit_copula(family, pair, opts));
    f.copula_coords.push_back(j);
  }
  return f;
}

CopulaForecaster fit_copula_har(const VechHistory& h, CopulaFamily family, int B,
                                std::uint64_t seed) {
  h.validate();
  const int m = h.width();
  const int n = vech_dim(m);
  if (family == CopulaFamily::t) require_length_t(h, 2);

  CopulaForecaster f;
  f.approach = Approach::copula_har;
  f.family = family;
  f.coord = h.coord;
  f.m = m;
  f.B = B;
  f.seed = seed;
  f.marginals = fit_marginals(h.series);
  const Matrix u = pit_columns(h.series, f.marginals);
  const int t_len = h.length();
  FitOptions opts;
  opts.rank_grid = t_len;

  std::vector<bool> is_diag(m, false);
  for (int k : diagonal_vech_indices(n)) is_diag[k] = true;

  Matrix pair(t_len - 1, 2);
  for (int j = 0; j < m; ++j) {
    if (is_diag[j]) {
      pair.col(0) = u.col(j).head(t_len - 1);
      pair.col(1) = u.col(j).tail(t_len - 1);
      f.copulas.push_back(fit_copula(family, pair, opts));
      f.copula_coords.push_back(j);
    } else {
      std::vector<double> col(t_len);
      for (int i = 0; i < t_len; ++i) col[i] = h.series(i, j);
      f.har.push_back(har_fit(col));
      f.har_coords.push_back(j);
    }
  }
  return f;
}

ForecastResult forecast_one(const CopulaForecaster& f, const VechHistory& h) {
  if (h.width() != f.m) throw DataError("forecast_one: history width mismatch");
  const int t_len = h.length();
  const Vector x_last = h.series.row(t_len - 1).transpose();
  const int m = f.m;

  Vector forecast(m);
  switch (f.approach) {
    case Approach::mc1: {
      Vector u_cond(m);
      for (int j = 0; j < m; ++j) u_cond[j] = f.marginals[j].cdf(x_last[j]);
      const Matrix v = conditional_sample(f.copulas[0], u_cond, f.B,
                                          derive_seed(f.seed, 11));
      for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int b = 0; b < f.B; ++b) acc += f.marginals[j].quantile(v(b, j));
        forecast[j] = acc / f.B;
      }
      break;
    }
    case Approach::mc2: {
      Vector u_cond(m);
      for (int j = 0; j < m; ++j) u_cond[j] = f.marginals[j].cdf(x_last[j]);
      for (int j = 0; j < m; ++j) {
        const Matrix v = conditional_sample(f.copulas[j], u_cond, f.B,
                                            derive_seed(f.seed, 12, j));
        double acc = 0.0;
        for (int b = 0; b < f.B; ++b) acc += f.marginals[j].quantile(v(b, 0));
        forecast[j] = acc / f.B;
      }
      break;
    }
    case Approach::entry: {
      for (int j = 0; j < m; ++j) {
        Vector u1(1);
        u1[0] = f.marginals[j].cdf(x_last[j]);
        const Matrix v = conditional_sample(f.copulas[j], u1, f.B,
                                            derive_seed(f.seed, 13, j));
        double acc = 0.0;
        for (int b = 0; b < f.B; ++b) acc += f.marginals[j].quantile(v(b, 0));
        forecast[j] = acc / f.B;
      }
      break;
    }
    case Approach::copula_har: {
      for (std::size_t c = 0; c < f.copula_coords.size(); ++c) {
        const int j = f.copula_coords[c];
        Vector u1(1);
        u1[0] = f.marginals[j].cdf(x_last[j]);
        const Matrix v = conditional_sample(f.copulas[c], u1, f.B,
                                            derive_seed(f.seed, 13, j));
        double acc = 0.0;
        for (int b = 0; b < f.B; ++b) acc += f.marginals[j].quantile(v(b, 0));
        forecast[j] = acc / f.B;
      }
      if (t_len < 22) throw DataError("forecast_one: copula_har needs 22 recent values");
      for (std::size_t c = 0; c < f.har_coords.size(); ++c) {
        const int j = f.har_coords[c];
        std::vector<double> recent(22);
        for (int i = 0; i < 22; ++i) recent[i] = h.series(t_len - 22 + i, j);
        forecast[j] = har_forecast(f.har[c], recent);
      }
      break;
    }
  }

  ForecastResult out;
  out.vech = VechVector{f.coord, forecast};
  TransformStats stats;
  out.mat = reconstruct_spd(out.vech, &stats);
  out.repaired = stats.diagonal_repairs > 0;
  return out;
}

}  // namespace rvcop
