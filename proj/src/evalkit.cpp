#include "rvcop/evalkit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rvcop/rng.hpp"

namespace rvcop {

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

double frobenius_day_loss(const Matrix& forecast, const Matrix& realized) {
  if (forecast.rows() != realized.rows() || forecast.cols() != realized.cols())
    throw DataError("frobenius_day_loss: dimension mismatch");
  const int n = static_cast<int>(forecast.rows());
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double e = forecast(i, j) - realized(i, j);
      acc += e * e;
    }
  return std::sqrt(acc);
}

double frobenius_rmse(const CovarianceSeries& forecasts, const CovarianceSeries& realized) {
  if (forecasts.size() != realized.size() || forecasts.size() == 0)
    throw DataError("frobenius_rmse: misaligned series");
  for (int t = 0; t < forecasts.size(); ++t)
    if (forecasts.dates[t] != realized.dates[t])
      throw DataError("frobenius_rmse: date mismatch at row " + std::to_string(t));
  double acc = 0.0;
  for (int t = 0; t < forecasts.size(); ++t)
    acc += frobenius_day_loss(forecasts.mats[t], realized.mats[t]);
  return acc / forecasts.size();
}

namespace {

double log_det_llt(const Eigen::LLT<Matrix>& llt, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += 2.0 * std::log(llt.matrixL()(i, i));
  return acc;
}

}  // namespace

double stein_loss(const Matrix& forecast, const Matrix& realized,
                  SteinOrientation orientation) {
  const int n = static_cast<int>(forecast.rows());
  if (realized.rows() != n || forecast.cols() != n || realized.cols() != n)
    throw DataError("stein_loss: dimension mismatch");
  const Matrix& num = orientation == SteinOrientation::underprediction_penalizing
                          ? realized
                          : forecast;
  const Matrix& den = orientation == SteinOrientation::underprediction_penalizing
                          ? forecast
                          : realized;
  Eigen::LLT<Matrix> llt_den(den);
  if (llt_den.info() != Eigen::Success)
    throw NumericError("stein_loss: denominator matrix is not positive definite");
  Eigen::LLT<Matrix> llt_num(num);
  if (llt_num.info() != Eigen::Success)
    throw NumericError("stein_loss: numerator matrix is not positive definite");
  const double tr = llt_den.solve(num).trace();
  const double logdet = log_det_llt(llt_num, n) - log_det_llt(llt_den, n);
  return tr - logdet - n;
}

// ---------------------------------------------------------------------------
// Model confidence set
// ---------------------------------------------------------------------------

int default_block_len(int t_out) {
  return std::max(1, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(t_out)))));
}

McsResult mcs(const std::map<std::string, std::vector<double>>& losses, double alpha,
              int n_boot, int block_len, std::uint64_t seed) {
  if (losses.empty()) throw DataError("mcs: no models");
  const int n_models = static_cast<int>(losses.size());
  std::vector<std::string> names;
  for (const auto& [name, series] : losses) names.push_back(name);
  const int t_out = static_cast<int>(losses.begin()->second.size());
  if (t_out < 2) throw DataError("mcs: loss series too short");
  for (const auto& [name, series] : losses)
    if (static_cast<int>(series.size()) != t_out)
      throw DataError("mcs: loss series length mismatch for model '" + name + "'");

  McsResult result;
  result.alpha = alpha;
  result.n_boot = n_boot;
  result.block_len = block_len;
  if (n_models == 1) {
    result.retained = names;
    result.pvalues[names[0]] = 1.0;
    return result;
  }

  Matrix l(t_out, n_models);
  for (int j = 0; j < n_models; ++j)
    for (int t = 0; t < t_out; ++t) l(t, j) = losses.at(names[j])[t];
  const Vector mean = l.colwise().mean();

  // circular block bootstrap of the per-model mean losses; replication b is a
  // pure function of (seed, b), so the parallel schedule cannot change results
  Matrix boot_means(n_boot, n_models);
  const int n_blocks = (t_out + block_len - 1) / block_len;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_boot; ++b) {
    RngStream rng = RngStream::from(seed, 0xb007, static_cast<std::uint64_t>(b));
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n_models);
    int taken = 0;
    for (int blk = 0; blk < n_blocks && taken < t_out; ++blk) {
      const int start = static_cast<int>(rng.uniform_index(t_out));
      for (int i = 0; i < block_len && taken < t_out; ++i, ++taken)
        acc += l.row((start + i) % t_out);
    }
    boot_means.row(b) = acc / t_out;
  }

  // pairwise means and bootstrap standard errors, fixed for all rounds
  Matrix se = Matrix::Zero(n_models, n_models);
  for (int i = 0; i < n_models; ++i)
    for (int j = i + 1; j < n_models; ++j) {
      double acc = 0.0;
      const double dbar = mean[i] - mean[j];
      for (int b = 0; b < n_boot; ++b) {
        const double diff = boot_means(b, i) - boot_means(b, j) - dbar;
        acc += diff * diff;
      }
      se(i, j) = se(j, i) = std::sqrt(acc / n_boot);
    }

  std::vector<int> active(n_models);
  std::iota(active.begin(), active.end(), 0);
  double running_p = 0.0;
  bool stopped = false;
  constexpr double kHugeT = 1e30;

  while (active.size() > 1) {
    // range statistic over the active set
    double t_max = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b2 = a + 1; b2 < active.size(); ++b2) {
        const int i = active[a], j = active[b2];
        const double dbar = mean[i] - mean[j];
        const double t_ij = se(i, j) > 0.0 ? std::fabs(dbar) / se(i, j)
                                           : (dbar == 0.0 ? 0.0 : kHugeT);
        t_max = std::max(t_max, t_ij);
      }
    // bootstrap distribution of the range statistic
    int exceed = 0;
    for (int b = 0; b < n_boot; ++b) {
      double t_star = 0.0;
      for (std::size_t a = 0; a < active.size(); ++a)
        for (std::size_t b2 = a + 1; b2 < active.size(); ++b2) {
          const int i = active[a], j = active[b2];
          if (se(i, j) <= 0.0) continue;
          const double diff = boot_means(b, i) - boot_means(b, j) - (mean[i] - mean[j]);
          t_star = std::max(t_star, std::fabs(diff) / se(i, j));
        }
      if (t_star >= t_max) ++exceed;
    }
    const double p_k = static_cast<double>(exceed) / n_boot;
    running_p = std::max(running_p, p_k);

    if (!stopped && p_k >= alpha) {
      stopped = true;
      for (int i : active) result.retained.push_back(names[i]);
    }
    // worst model: largest t_ij against any rival, lowest index on ties
    int worst_pos = 0;
    double worst_t = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < active.size(); ++a) {
      double ti = -std::numeric_limits<double>::infinity();
      for (std::size_t b2 = 0; b2 < active.size(); ++b2) {
        if (a == b2) continue;
        const int i = active[a], j = active[b2];
        const double dbar = mean[i] - mean[j];
        const double t_ij = se(i, j) > 0.0 ? dbar / se(i, j)
                                           : (dbar == 0.0 ? 0.0 : (dbar > 0 ? kHugeT : -kHugeT));
        ti = std::max(ti, t_ij);
      }
      if (ti > worst_t) {
        worst_t = ti;
        worst_pos = static_cast<int>(a);
      }
    }
    const int worst = active[worst_pos];
    result.pvalues[names[worst]] = running_p;
    result.elimination_order.push_back(names[worst]);
    active.erase(active.begin() + worst_pos);
  }
  result.pvalues[names[active[0]]] = 1.0;
  if (!stopped) result.retained.push_back(names[active[0]]);
  std::sort(result.retained.begin(), result.retained.end());
  return result;
}

// ---------------------------------------------------------------------------
// GMVP
// ---------------------------------------------------------------------------

namespace {

struct KktSolve {
  Vector weights;
  Vector lambda;
  bool ok = false;
};

// equality-constrained minimum variance on the free set
KktSolve solve_kkt(const Matrix& gamma, const std::vector<int>& free_set,
                   const std::vector<Vector>& eq_rows, const std::vector<double>& eq_rhs,
                   int n) {
  const int nf = static_cast<int>(free_set.size());
  const int ne = static_cast<int>(eq_rows.size());
  Matrix kkt = Matrix::Zero(nf + ne, nf + ne);
  Vector rhs = Vector::Zero(nf + ne);
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b) kkt(a, b) = 2.0 * gamma(free_set[a], free_set[b]);
  // stationarity rows carry -A' so lambda is the standard multiplier:
  // 2 Gamma w - A' lambda = 0 on the free set
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < nf; ++a) {
      kkt(nf + e, a) = eq_rows[e][free_set[a]];
      kkt(a, nf + e) = -eq_rows[e][free_set[a]];
    }
    rhs[nf + e] = eq_rhs[e];
  }
  Eigen::FullPivLU<Matrix> lu(kkt);
  KktSolve out;
  Vector sol = lu.solve(rhs);
  const double resid = (kkt * sol - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (!sol.allFinite() || resid > 1e-8 * scale) return out;
  out.weights = Vector::Zero(n);
  for (int a = 0; a < nf; ++a) out.weights[free_set[a]] = sol[a];
  out.lambda = sol.tail(ne);
  out.ok = true;
  return out;
}

}  // namespace

GmvpResult gmvp(const Matrix& forecast, const Vector& expected_returns,
                std::optional<double> mu_p) {
  const int n = static_cast<int>(forecast.rows());
  if (expected_returns.size() != n) throw DataError("gmvp: size mismatch");
  GmvpResult out;
  out.mu_p = mu_p;
  if (mu_p && (*mu_p < expected_returns.minCoeff() - 1e-12 ||
               *mu_p > expected_returns.maxCoeff() + 1e-12)) {
    out.feasible = false;
    return out;
  }

  std::vector<Vector> eq_rows{Vector::Ones(n)};
  std::vector<double> eq_rhs{1.0};
  if (mu_p) {
    eq_rows.push_back(expected_returns);
    eq_rhs.push_back(*mu_p);
  }

  // feasible starting point: uniform, or a two-asset mix hitting the target
  Vector w = Vector::Constant(n, 1.0 / n);
  if (mu_p) {
    int lo = 0, hi = 0;
    for (int i = 1; i < n; ++i) {
      if (expected_returns[i] < expected_returns[lo]) lo = i;
      if (expected_returns[i] > expected_returns[hi]) hi = i;
    }
    const double span = expected_returns[hi] - expected_returns[lo];
    if (span < 1e-14) {
      if (std::fabs(*mu_p - expected_returns[lo]) > 1e-10) {
        out.feasible = false;
        return out;
      }
    } else {
      const double t =
          std::clamp((*mu_p - expected_returns[lo]) / span, 0.0, 1.0);
      w.setZero();
      w[lo] = 1.0 - t;
      w[hi] = t;
    }
  }

  // primal active set with step-length control: move toward the
  // equality-constrained optimum of the current free set, blocking at bounds
  std::vector<bool> at_bound(n, false);
  for (int i = 0; i < n; ++i) at_bound[i] = w[i] <= 0.0;
  const double grad_scale = std::max(1e-300, (2.0 * forecast * w).cwiseAbs().maxCoeff());
  const int max_iter = 100 * n + 100;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> free_set;
    for (int i = 0; i < n; ++i)
      if (!at_bound[i]) free_set.push_back(i);
    if (free_set.empty()) {
      out.feasible = false;
      return out;
    }
    KktSolve sol = solve_kkt(forecast, free_set, eq_rows, eq_rhs, n);
    if (!sol.ok) {
      out.feasible = false;
      return out;
    }
    Vector p = sol.weights - w;
    const double move = p.cwiseAbs().maxCoeff();
    if (move > 1e-13) {
      // step toward the subset optimum, stopping at the first bound
      double alpha = 1.0;
      int blocker = -1;
      for (int i : free_set) {
        if (p[i] < -1e-300 && w[i] + alpha * p[i] < 0.0) {
          const double ai = w[i] / (-p[i]);
          if (ai < alpha - 1e-15) {
            alpha = std::max(0.0, ai);
            blocker = i;
          }
        }
      }
      w += alpha * p;
      if (blocker >= 0) {
        w[blocker] = 0.0;
        at_bound[blocker] = true;
        continue;
      }
      w = sol.weights;  // full step reached the subset optimum
    }
    // at the subset optimum: release the most negative bound multiplier
    Vector eta = 2.0 * forecast * w;
    for (std::size_t e = 0; e < eq_rows.size(); ++e) eta -= sol.lambda[e] * eq_rows[e];
    int release = -1;
    double most_neg = -1e-9 * grad_scale;
    for (int i = 0; i < n; ++i)
      if (at_bound[i] && eta[i] < most_neg) {
        most_neg = eta[i];
        release = i;
      }
    if (release >= 0) {
      at_bound[release] = false;
      continue;
    }
    out.weights = w;
    out.forecast_sd = std::sqrt(std::max(0.0, w.dot(forecast * w)));
    return out;
  }
  throw NumericError("gmvp: active-set iteration did not converge");
}

double gmvp_kkt_residual(const Matrix& forecast, const Vector& expected_returns,
                         std::optional<double> mu_p, const Vector& weights) {
  const int n = static_cast<int>(forecast.rows());
  double resid = std::fabs(weights.sum() - 1.0);
  if (mu_p) resid = std::max(resid, std::fabs(weights.dot(expected_returns) - *mu_p));
  for (int i = 0; i < n; ++i) resid = std::max(resid, std::max(0.0, -weights[i]));

  // stationarity: grad = A'lambda + eta with eta = 0 on free coordinates and
  // eta >= 0 on active bounds. lambda is identified from the free rows; when
  // those rows are rank-deficient the leftover one-dimensional ambiguity is
  // resolved by searching the null direction for a nonnegative eta.
  const int ne = mu_p ? 2 : 1;
  Matrix a(n, ne);
  a.col(0).setOnes();
  if (mu_p) a.col(1) = expected_returns;
  const Vector grad = 2.0 * forecast * weights;
  std::vector<int> free_set;
  for (int i = 0; i < n; ++i)
    if (weights[i] > 1e-8) free_set.push_back(i);
  const int nf = static_cast<int>(free_set.size());
  Matrix af(nf, ne);
  Vector gf(nf);
  for (int r = 0; r < nf; ++r) {
    af.row(r) = a.row(free_set[r]);
    gf[r] = grad[free_set[r]];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(af);
  qr.setThreshold(1e-10);
  Vector lambda = qr.solve(gf);
  resid = std::max(resid, (gf - af * lambda).cwiseAbs().maxCoeff());

  auto eta_violation = [&](const Vector& lam) {
    double v = 0.0;
    const Vector eta = grad - a * lam;
    for (int i = 0; i < n; ++i)
      if (weights[i] <= 1e-8) v = std::max(v, -eta[i]);
    return v;
  };
  if (static_cast<int>(qr.rank()) == ne || ne == 1) {
    resid = std::max(resid, eta_violation(lambda));
    return resid;
  }
  // rank-deficient free rows with two multipliers: scan lambda + t * nu
  Vector nu(2);
  if (nf > 0) {
    nu << -af(0, 1), af(0, 0);  // orthogonal to the (parallel) free rows
  } else {
    nu << 0.0, 1.0;
  }
  const double norm = nu.norm();
  if (norm < 1e-300) {
    resid = std::max(resid, eta_violation(lambda));
    return resid;
  }
  nu /= norm;
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  double base_violation = 0.0;
  for (int i = 0; i < n; ++i) {
    if (weights[i] > 1e-8) continue;
    const double c = a.row(i).dot(nu);
    const double d = grad[i] - a.row(i).dot(lambda);
    if (std::fabs(c) < 1e-14) {
      base_violation = std::max(base_violation, -d);
    } else if (c > 0.0) {
      t_hi = std::min(t_hi, d / c);
    } else {
      t_lo = std::max(t_lo, d / c);
    }
  }
  if (t_lo <= t_hi) {
    resid = std::max(resid, base_violation);
  } else {
    const double t_mid = 0.5 * (t_lo + t_hi);
    resid = std::max(resid, eta_violation(lambda + t_mid * nu));
  }
  return resid;
}

// ---------------------------------------------------------------------------
// Efficient frontier
// ---------------------------------------------------------------------------

std::vector<double> default_mu_grid(const Matrix& expected_returns, int points) {
  std::vector<double> pooled(expected_returns.data(),
                             expected_returns.data() + expected_returns.size());
  std::sort(pooled.begin(), pooled.end());
  auto pct = [&](double q) {
    const double pos = q * (pooled.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - lo;
    return lo + 1 < pooled.size() ? pooled[lo] * (1 - frac) + pooled[lo + 1] * frac
                                  : pooled[lo];
  };
  const double lo = pct(0.10), hi = pct(0.90);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  return grid;
}

std::vector<FrontierPoint> efficient_frontier(
    const std::map<std::string, CovarianceSeries>& forecasts,
    const CovarianceSeries& realized, const Matrix& expected_returns,
    const std::vector<double>& mu_grid) {
  const int t_out = realized.size();
  if (expected_returns.rows() != t_out)
    throw DataError("efficient_frontier: expected-return rows must match days");
  std::vector<std::string> models{"oracle"};
  for (const auto& [name, series] : forecasts) {
    if (series.size() != t_out)
      throw DataError("efficient_frontier: misaligned forecasts for '" + name + "'");
    models.push_back(name);
  }
  const int n_pts = static_cast<int>(mu_grid.size());
  std::vector<FrontierPoint> out(models.size() * n_pts);

  const int total = static_cast<int>(models.size()) * n_pts;
#pragma omp parallel for schedule(dynamic)
  for (int item = 0; item < total; ++item) {
    const int mi = item / n_pts;
    const int gi = item % n_pts;
    const std::string& model = models[mi];
    const CovarianceSeries* fc = model == "oracle" ? &realized : &forecasts.at(model);
    double acc = 0.0;
    int feasible = 0;
    for (int t = 0; t < t_out; ++t) {
      // exceptions must not escape the parallel region; a failed solve counts
      // as an infeasible day
      try {
        GmvpResult sol =
            gmvp(fc->mats[t], expected_returns.row(t).transpose(), mu_grid[gi]);
        if (!sol.feasible) continue;
        const Vector& w = sol.weights;
        acc += std::sqrt(std::max(0.0, w.dot(realized.mats[t] * w)));
        ++feasible;
      } catch (const std::exception&) {
        continue;
      }
    }
    FrontierPoint pt;
    pt.model = model;
    pt.mu_p = mu_grid[gi];
    pt.n_feasible_days = feasible;
    pt.avg_sd = feasible > 0 ? acc / feasible : std::numeric_limits<double>::quiet_NaN();
    out[item] = pt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank correlations
// ---------------------------------------------------------------------------

namespace {

// average ranks, ties share the mean rank
std::vector<double> average_ranks(const Vector& col) {
  const int n = static_cast<int>(col.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return col[a] < col[b]; });
  std::vector<double> ranks(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && col[idx[j]] == col[idx[i]]) ++j;
    const double r = 0.5 * (i + j - 1) + 1.0;
    for (int k = i; k < j; ++k) ranks[idx[k]] = r;
    i = j;
  }
  return ranks;
}

}  // namespace

Matrix rank_corr_matrix(const VechHistory& h) {
  h.validate();
  const int t_len = h.length(), m = h.width();
  Matrix stacked(t_len - 1, 2 * m);
  stacked.leftCols(m) = h.series.topRows(t_len - 1);
  stacked.rightCols(m) = h.series.bottomRows(t_len - 1);

  const int d = 2 * m;
  const int rows = t_len - 1;
  Matrix ranks(rows, d);
  std::vector<bool> constant(d, false);
  for (int j = 0; j < d; ++j) {
    const auto r = average_ranks(stacked.col(j));
    for (int i = 0; i < rows; ++i) ranks(i, j) = r[i];
    constant[j] = stacked.col(j).maxCoeff() == stacked.col(j).minCoeff();
  }
  Matrix centered = ranks.rowwise() - ranks.colwise().mean();
  Matrix cov = centered.transpose() * centered;
  Matrix rho(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (constant[i] || constant[j]) {
        rho(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        rho(i, j) = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
      }
    }
  return rho;
}

}  // namespace rvcop
