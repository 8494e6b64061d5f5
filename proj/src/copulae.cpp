#include "rvcop/copulae.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rvcop/optim.hpp"
#include "rvcop/rng.hpp"

namespace rvcop {

namespace {

constexpr double kNuLo = 2.1;
constexpr double kNuHi = 200.0;
constexpr double kThetaClaytonLo = 1e-4;
constexpr double kThetaClaytonHi = 50.0;
constexpr double kThetaGumbelLo = 1.0;
constexpr double kThetaGumbelHi = 50.0;

void check_pseudo_sample(const Matrix& u) {
  if (u.rows() < 2 || u.cols() < 2) throw DataError("pseudo-sample must be N x d with d >= 2");
  if ((u.array() <= 0.0).any() || (u.array() >= 1.0).any())
    throw DataError("pseudo-observations must lie strictly inside (0,1)");
}

void check_interior_point(const CopulaModel& c, const Vector& u) {
  if (u.size() != c.dim) throw DataError("point dimension does not match copula");
  for (int i = 0; i < u.size(); ++i)
    if (!(u[i] > 0.0 && u[i] < 1.0))
      throw NumericError("copula density: boundary or exterior point rejected");
}

// ---------------------------------------------------------------------------
// Kendall tau (Knight's O(N log N) algorithm, tie-adjusted tau-b)
// ---------------------------------------------------------------------------

// counts inversions in v by iterative mergesort
long long merge_count(std::vector<double>& v, std::vector<double>& buf) {
  const std::size_t n = v.size();
  long long swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<long long>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
      std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    }
  }
  return swaps;
}

long long tie_count(const std::vector<double>& sorted) {
  long long t = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const long long r = static_cast<long long>(j - i);
    t += r * (r - 1) / 2;
    i = j;
  }
  return t;
}

}  // namespace

double kendall_tau(const Vector& x, const Vector& y) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  if (y.size() != x.size() || n < 2) throw DataError("kendall_tau: size mismatch");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[idx[i]];
    ys[i] = y[idx[i]];
  }
  // joint ties and x ties from the (x, y)-sorted order
  long long xtie = 0, xytie = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && xs[j] == xs[i]) ++j;
      const long long r = static_cast<long long>(j - i);
      xtie += r * (r - 1) / 2;
      std::size_t a = i;
      while (a < j) {
        std::size_t b = a;
        while (b < j && ys[b] == ys[a]) ++b;
        const long long q = static_cast<long long>(b - a);
        xytie += q * (q - 1) / 2;
        a = b;
      }
      i = j;
    }
  }
  std::vector<double> buf(n);
  const long long dis = merge_count(ys, buf);  // ys now sorted
  const long long ytie = tie_count(ys);
  const long long tot = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  const double num = static_cast<double>(tot - xtie - ytie + xytie - 2 * dis);
  const double den = std::sqrt(static_cast<double>(tot - xtie)) *
                     std::sqrt(static_cast<double>(tot - ytie));
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

Matrix kendall_tau_matrix(const Matrix& columns) {
  const int d = static_cast<int>(columns.cols());
  Matrix tau = Matrix::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      tau(i, j) = tau(j, i) = kendall_tau(columns.col(i), columns.col(j));
  return tau;
}

double tau_from_rho_t(double rho) { return 2.0 / M_PI * std::asin(rho); }
double tau_clayton(double theta) { return theta / (theta + 2.0); }
double tau_gumbel(double theta) { return 1.0 - 1.0 / theta; }

// ---------------------------------------------------------------------------
// Student t building blocks
// ---------------------------------------------------------------------------

double student_t_cdf(double x, double nu) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

double student_t_quantile(double p, double nu) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(nu), p);
}

double student_t_log_pdf(double x, double nu) {
  const double c = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                   0.5 * std::log(nu * M_PI);
  return c - (nu + 1.0) / 2.0 * std::log1p(x * x / nu);
}

namespace {

// log density of the t copula at quantile-transformed coordinates x,
// given the Cholesky factor of R
double t_copula_log_density_x(const Vector& x, const Eigen::LLT<Matrix>& llt,
                              double logdet_r, double nu) {
  const int d = static_cast<int>(x.size());
  Vector w = llt.matrixL().solve(x);
  const double q = w.squaredNorm();
  double ll = std::lgamma((nu + d) / 2.0) - std::lgamma(nu / 2.0) -
              d / 2.0 * std::log(nu * M_PI) - 0.5 * logdet_r -
              (nu + d) / 2.0 * std::log1p(q / nu);
  for (int i = 0; i < d; ++i) ll -= student_t_log_pdf(x[i], nu);
  return ll;
}

// Quantile and log1p(x^2/nu) tables on the rank grid {r/(G+1)}. They depend
// only on (G, nu), so they are memoized per thread across fits and days.
struct RankTables {
  std::vector<double> tq, tl;
};

const RankTables& rank_tables(int grid, double nu) {
  struct Key {
    int grid;
    std::uint64_t nu_bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>()(k.nu_bits * 1000003ULL + k.grid);
    }
  };
  thread_local std::unordered_map<Key, RankTables, KeyHash> cache;
  if (cache.size() > 8192) cache.clear();
  std::uint64_t bits;
  std::memcpy(&bits, &nu, sizeof(bits));
  auto [it, inserted] = cache.try_emplace(Key{grid, bits});
  if (inserted) {
    RankTables& t = it->second;
    t.tq.resize(grid + 1);
    t.tl.resize(grid + 1);
    const double g1 = grid + 1.0;
    // symmetry: tinv(1 - u) = -tinv(u)
    for (int r = 1; 2 * r <= grid + 1; ++r) {
      t.tq[r] = student_t_quantile(r / g1, nu);
      t.tq[grid + 1 - r] = -t.tq[r];
    }
    for (int r = 1; r <= grid; ++r) t.tl[r] = std::log1p(t.tq[r] * t.tq[r] / nu);
  }
  return it->second;
}

double t_copula_log_likelihood(const Matrix& u, const Eigen::LLT<Matrix>& llt,
                               double logdet_r, double nu, int rank_grid) {
  const int n = static_cast<int>(u.rows());
  const int d = static_cast<int>(u.cols());
  Matrix x(n, d);
  double sum_log1p_marg = 0.0;
  if (rank_grid > 0) {
    const double g1 = rank_grid + 1.0;
    const RankTables& t = rank_tables(rank_grid, nu);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < n; ++i) {
        int r = static_cast<int>(std::lround(u(i, j) * g1));
        r = std::clamp(r, 1, rank_grid);
        x(i, j) = t.tq[r];
        sum_log1p_marg += t.tl[r];
      }
    }
  } else {
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < n; ++i) {
        const double xv = student_t_quantile(u(i, j), nu);
        x(i, j) = xv;
        sum_log1p_marg += std::log1p(xv * xv / nu);
      }
    }
  }
  Matrix w = llt.matrixL().solve(x.transpose());  // d x n
  const double c_d = std::lgamma((nu + d) / 2.0) - std::lgamma(nu / 2.0) -
                     d / 2.0 * std::log(nu * M_PI);
  const double c_1 = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                     0.5 * std::log(nu * M_PI);
  double sum_log1p_joint = 0.0;
  for (int i = 0; i < n; ++i) sum_log1p_joint += std::log1p(w.col(i).squaredNorm() / nu);
  return n * c_d - 0.5 * n * logdet_r - (nu + d) / 2.0 * sum_log1p_joint -
         (n * d * c_1 - (nu + 1.0) / 2.0 * sum_log1p_marg);
}

// exchangeable Clayton log density in d dimensions, stable for large theta
double clayton_log_density(const Vector& u, double theta, int d) {
  double amax = 0.0, sum_log_u = 0.0;
  for (int i = 0; i < d; ++i) {
    const double a = -theta * std::log(u[i]);
    amax = std::max(amax, a);
    sum_log_u += std::log(u[i]);
  }
  double inner = -(d - 1) * std::exp(-amax);
  for (int i = 0; i < d; ++i) inner += std::exp(-theta * std::log(u[i]) - amax);
  const double log_s = amax + std::log(inner);
  double lc = -(1.0 + theta) * sum_log_u - (d + 1.0 / theta) * log_s;
  for (int k = 1; k < d; ++k) lc += std::log1p(k * theta);
  return lc;
}

// bivariate Gumbel log density
double gumbel_log_density(double u, double v, double theta) {
  const double x = -std::log(u), y = -std::log(v);
  const double lx = std::log(x), ly = std::log(y);
  const double m = std::max(theta * lx, theta * ly);
  const double log_s = m + std::log(std::exp(theta * lx - m) + std::exp(theta * ly - m));
  const double a = std::exp(log_s / theta);  // S^{1/theta}
  return -a + (theta - 1.0) * (lx + ly) + (1.0 / theta - 2.0) * log_s +
         std::log(a + theta - 1.0) + x + y;
}

double archimedean_log_likelihood(const Matrix& u, CopulaFamily fam, double theta) {
  const int n = static_cast<int>(u.rows());
  const int d = static_cast<int>(u.cols());
  double ll = 0.0;
  if (fam == CopulaFamily::clayton) {
    const Eigen::ArrayXXd log_u = u.array().log();
    if (-theta * log_u.minCoeff() < 600.0) {
      // vectorized path, safe from overflow at this argument range
      const Eigen::ArrayXd s =
          (-theta * log_u).exp().rowwise().sum() - (d - 1);
      ll = -(1.0 + theta) * log_u.sum() - (d + 1.0 / theta) * s.log().sum();
      for (int k = 1; k < d; ++k) ll += n * std::log1p(k * theta);
    } else {
      for (int i = 0; i < n; ++i)
        ll += clayton_log_density(u.row(i).transpose(), theta, d);
    }
  } else {
    for (int i = 0; i < n; ++i) ll += gumbel_log_density(u(i, 0), u(i, 1), theta);
  }
  return ll;
}

}  // namespace

bool project_to_correlation(Matrix& r) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  const double floor = 1e-6;
  bool clipped = es.eigenvalues().minCoeff() < floor;
  if (clipped) {
    Vector lam = es.eigenvalues().cwiseMax(floor);
    r = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  }
  Vector d = r.diagonal().array().sqrt().inverse();
  r = d.asDiagonal() * r * d.asDiagonal();
  r.diagonal().setOnes();
  r = (r + r.transpose()) / 2.0;
  return clipped;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

CopulaModel fit_copula(CopulaFamily family, const Matrix& u, const FitOptions& opts) {
  check_pseudo_sample(u);
  const int n = static_cast<int>(u.rows());
  const int d = static_cast<int>(u.cols());
  for (int j = 0; j < d; ++j) {
    if (u.col(j).maxCoeff() == u.col(j).minCoeff())
      throw NumericError("fit_copula: column " + std::to_string(j) + " is constant");
  }

  CopulaModel model;
  model.family = family;
  model.dim = d;

  if (family == CopulaFamily::t) {
    if (n < 10 * d)
      throw DataError("fit_copula(t): need at least " + std::to_string(10 * d) +
                      " rows for dimension " + std::to_string(d) + ", got " +
                      std::to_string(n));
    Matrix tau = kendall_tau_matrix(u);
    Matrix r(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        r(i, j) = i == j ? 1.0 : std::sin(M_PI * tau(i, j) / 2.0);
    model.boundary = project_to_correlation(r);
    model.corr = r;
    Eigen::LLT<Matrix> llt(r);
    if (llt.info() != Eigen::Success)
      throw NumericError("fit_copula(t): projected correlation not PD");
    double logdet_r = 0.0;
    for (int i = 0; i < d; ++i) logdet_r += 2.0 * std::log(llt.matrixL()(i, i));
    auto neg_ll = [&](double nu) {
      return -t_copula_log_likelihood(u, llt, logdet_r, nu, opts.rank_grid);
    };
    // profile likelihood over nu: a fixed log-spaced grid brackets the
    // optimum (canonical points, so the rank tables memoize across fits),
    // then golden section refines inside the bracket
    static constexpr double kNuGrid[] = {2.1,  3.0,  4.3,   6.2,   8.9,   12.8, 18.4,
                                         26.4, 37.9, 54.5,  78.2,  112.3, 161.3, 200.0};
    constexpr int kGridLen = static_cast<int>(std::size(kNuGrid));
    int best_i = 0;
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGridLen; ++i) {
      const double f = neg_ll(kNuGrid[i]);
      if (f < best_f) {
        best_f = f;
        best_i = i;
      }
    }
    const double lo = kNuGrid[std::max(0, best_i - 1)];
    const double hi = kNuGrid[std::min(kGridLen - 1, best_i + 1)];
    ScalarMin best = golden_section_min(neg_ll, lo, hi, 0.02 * (hi - lo));
    if (best_f < best.fx) best = ScalarMin{kNuGrid[best_i], best_f};
    model.nu = best.x;
    model.loglik = -best.fx;
    if (best.x > kNuHi - 1.0) model.boundary = true;  // Gaussian-like
    return model;
  }

  if (family == CopulaFamily::gumbel && d != 2)
    throw DataError("fit_copula: gumbel is offered bivariately only");
  if (n < 20) throw DataError("fit_copula: need at least 20 rows");

  const double lo = family == CopulaFamily::clayton ? kThetaClaytonLo : kThetaGumbelLo;
  const double hi = family == CopulaFamily::clayton ? kThetaClaytonHi : kThetaGumbelHi;
  auto neg_ll = [&](double theta) { return -archimedean_log_likelihood(u, family, theta); };
  ScalarMin best = golden_section_min(neg_ll, lo, hi, 4e-4 * (hi - lo));
  model.theta = best.x;
  model.loglik = -best.fx;
  const double span = hi - lo;
  if (best.x < lo + 1e-3 * span || best.x > hi - 1e-3 * span) model.boundary = true;
  return model;
}

double copula_log_density(const CopulaModel& c, const Vector& u) {
  check_interior_point(c, u);
  if (c.family == CopulaFamily::t) {
    Eigen::LLT<Matrix> llt(c.corr);
    double logdet_r = 0.0;
    for (int i = 0; i < c.dim; ++i) logdet_r += 2.0 * std::log(llt.matrixL()(i, i));
    Vector x(c.dim);
    for (int i = 0; i < c.dim; ++i) x[i] = student_t_quantile(u[i], c.nu);
    return t_copula_log_density_x(x, llt, logdet_r, c.nu);
  }
  if (c.family == CopulaFamily::clayton) return clayton_log_density(u, c.theta, c.dim);
  return gumbel_log_density(u[0], u[1], c.theta);
}

double copula_density(const CopulaModel& c, const Vector& u) {
  return std::exp(copula_log_density(c, u));
}

double copula_log_likelihood(const CopulaModel& c, const Matrix& u) {
  if (static_cast<int>(u.cols()) != c.dim) throw DataError("sample dimension mismatch");
  if (c.family == CopulaFamily::t) {
    Eigen::LLT<Matrix> llt(c.corr);
    double logdet_r = 0.0;
    for (int i = 0; i < c.dim; ++i) logdet_r += 2.0 * std::log(llt.matrixL()(i, i));
    return t_copula_log_likelihood(u, llt, logdet_r, c.nu, 0);
  }
  return archimedean_log_likelihood(u, c.family, c.theta);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

// Positive stable draw with Laplace transform exp(-t^alpha), 0 < alpha < 1
// (Kanter's representation). Drives the Gumbel frailty.
double positive_stable(double alpha, RngStream& rng) {
  const double theta = M_PI * rng.uniform_open();
  const double w = rng.exponential();
  const double log_a = std::log(std::sin((1.0 - alpha) * theta)) +
                       alpha / (1.0 - alpha) * std::log(std::sin(alpha * theta)) -
                       1.0 / (1.0 - alpha) * std::log(std::sin(theta));
  return std::exp((1.0 - alpha) / alpha * (log_a - std::log(w)));
}

Vector sample_t_row(const Matrix& chol_lower, double nu, int d, RngStream& rng) {
  Vector z(d);
  for (int i = 0; i < d; ++i) z[i] = rng.normal();
  Vector x = chol_lower * z;
  const double w = rng.chi_squared(nu) / nu;
  x /= std::sqrt(w);
  Vector u(d);
  for (int i = 0; i < d; ++i) u[i] = student_t_cdf(x[i], nu);
  return u;
}

}  // namespace

Matrix sample_copula(const CopulaModel& c, int B, std::uint64_t seed) {
  if (B < 1) throw DataError("sample_copula: B must be >= 1");
  const int d = c.dim;
  Matrix out(B, d);
  RngStream rng = RngStream::from(seed, 0x5a3f);
  switch (c.family) {
    case CopulaFamily::t: {
      Eigen::LLT<Matrix> llt(c.corr);
      Matrix l = llt.matrixL();
      for (int b = 0; b < B; ++b) out.row(b) = sample_t_row(l, c.nu, d, rng).transpose();
      break;
    }
    case CopulaFamily::clayton: {
      for (int b = 0; b < B; ++b) {
        if (c.theta < 1e-8) {
          for (int i = 0; i < d; ++i) out(b, i) = rng.uniform_open();
        } else {
          const double v = rng.gamma(1.0 / c.theta);
          for (int i = 0; i < d; ++i) {
            const double e = rng.exponential();
            out(b, i) = std::exp(-std::log1p(e / v) / c.theta);
          }
        }
      }
      break;
    }
    case CopulaFamily::gumbel: {
      const double alpha = 1.0 / c.theta;
      for (int b = 0; b < B; ++b) {
        if (c.theta <= 1.0 + 1e-9) {
          for (int i = 0; i < d; ++i) out(b, i) = rng.uniform_open();
        } else {
          const double v = positive_stable(alpha, rng);
          for (int i = 0; i < d; ++i) {
            const double e = rng.exponential();
            out(b, i) = std::exp(-std::pow(e / v, alpha));
          }
        }
      }
      break;
    }
  }
  // frailty constructions can produce values that round to the boundary
  for (int b = 0; b < B; ++b)
    for (int i = 0; i < d; ++i)
      out(b, i) = std::clamp(out(b, i), 1e-15, 1.0 - 1e-15);
  return out;
}

// ---------------------------------------------------------------------------
// Conditional sampling
// ---------------------------------------------------------------------------

namespace {

Matrix conditional_sample_t(const CopulaModel& c, const Vector& u_cond, int B,
                            RngStream& rng) {
  const int d1 = static_cast<int>(u_cond.size());
  const int d2 = c.dim - d1;
  Vector x1(d1);
  for (int i = 0; i < d1; ++i) x1[i] = student_t_quantile(u_cond[i], c.nu);

  const Matrix r11 = c.corr.topLeftCorner(d1, d1);
  const Matrix r12 = c.corr.topRightCorner(d1, d2);
  const Matrix r22 = c.corr.bottomRightCorner(d2, d2);
  Eigen::LLT<Matrix> llt11(r11);
  if (llt11.info() != Eigen::Success)
    throw NumericError("conditional_sample(t): conditioning block not PD");
  const Vector w = llt11.solve(x1);                  // R11^{-1} x1
  const double q = x1.dot(w);
  const Vector mu = r12.transpose() * w;             // conditional location
  Matrix s_cond = r22 - r12.transpose() * llt11.solve(r12);
  const double df = c.nu + d1;
  s_cond *= (c.nu + q) / df;
  Eigen::LLT<Matrix> llt_cond(Matrix((s_cond + s_cond.transpose()) / 2.0));
  if (llt_cond.info() != Eigen::Success)
    throw NumericError("conditional_sample(t): conditional scale not PD");
  const Matrix l = llt_cond.matrixL();

  Matrix out(B, d2);
  for (int b = 0; b < B; ++b) {
    Vector z(d2);
    for (int i = 0; i < d2; ++i) z[i] = rng.normal();
    const double w2 = rng.chi_squared(df) / df;
    Vector x2 = mu + (l * z) / std::sqrt(w2);
    for (int i = 0; i < d2; ++i) out(b, i) = student_t_cdf(x2[i], c.nu);
  }
  return out;
}

// conditional CDF of one more Clayton coordinate given k fixed ones with
// psi-inverse sum s:  F(u) = (1 + psi_inv(u)/(1+s))^{-(1/theta + k)}
double clayton_conditional_draw(double theta, double s, int k, double q, RngStream&) {
  const double logq = std::log(q);
  auto log_f = [&](double u) {
    const double a = std::expm1(-theta * std::log(u));
    return -(1.0 / theta + k) * std::log1p(a / (1.0 + s));
  };
  const double lo = 1e-15, hi = 1.0 - 1e-15;
  if (log_f(lo) >= logq) return lo;
  if (log_f(hi) <= logq) return hi;
  return brent_root([&](double u) { return log_f(u) - logq; }, lo, hi, 1e-10, 200,
                    "clayton conditional inverse");
}

Matrix conditional_sample_clayton(const CopulaModel& c, const Vector& u_cond, int B,
                                  RngStream& rng) {
  const int d1 = static_cast<int>(u_cond.size());
  const int d2 = c.dim - d1;
  Matrix out(B, d2);
  if (c.theta < 1e-8) {
    for (int b = 0; b < B; ++b)
      for (int i = 0; i < d2; ++i) out(b, i) = rng.uniform_open();
    return out;
  }
  double s0 = 0.0;
  for (int i = 0; i < d1; ++i) s0 += std::expm1(-c.theta * std::log(u_cond[i]));
  for (int b = 0; b < B; ++b) {
    double s = s0;
    for (int i = 0; i < d2; ++i) {
      const double q = rng.uniform_open();
      const double u = clayton_conditional_draw(c.theta, s, d1 + i, q, rng);
      out(b, i) = u;
      s += std::expm1(-c.theta * std::log(u));
    }
  }
  return out;
}

Matrix conditional_sample_gumbel(const CopulaModel& c, const Vector& u_cond, int B,
                                 RngStream& rng) {
  if (c.dim != 2 || u_cond.size() != 1)
    throw NumericError("conditional_sample(gumbel): bivariate only");
  const double theta = c.theta;
  const double u1 = u_cond[0];
  Matrix out(B, 1);
  if (theta <= 1.0 + 1e-9) {
    for (int b = 0; b < B; ++b) out(b, 0) = rng.uniform_open();
    return out;
  }
  const double x = -std::log(u1);
  const double lx = std::log(x);
  // log dC/du1 as a function of v
  auto log_h = [&](double v) {
    const double y = -std::log(v);
    const double ly = std::log(y);
    const double m = std::max(theta * lx, theta * ly);
    const double log_s = m + std::log(std::exp(theta * lx - m) + std::exp(theta * ly - m));
    const double a = std::exp(log_s / theta);
    return -a + (theta - 1.0) * lx + (1.0 / theta - 1.0) * log_s + x;
  };
  const double lo = 1e-15, hi = 1.0 - 1e-15;
  for (int b = 0; b < B; ++b) {
    const double logq = std::log(rng.uniform_open());
    if (log_h(lo) >= logq) {
      out(b, 0) = lo;
    } else if (log_h(hi) <= logq) {
      out(b, 0) = hi;
    } else {
      out(b, 0) = brent_root([&](double v) { return log_h(v) - logq; }, lo, hi, 1e-10,
                             200, "gumbel conditional inverse");
    }
  }
  return out;
}

}  // namespace

Matrix conditional_sample(const CopulaModel& c, const Vector& u_cond, int B,
                          std::uint64_t seed) {
  const int d1 = static_cast<int>(u_cond.size());
  if (d1 < 1 || d1 >= c.dim)
    throw DataError("conditional_sample: need 1 <= d1 < dim");
  for (int i = 0; i < d1; ++i)
    if (!(u_cond[i] > 0.0 && u_cond[i] < 1.0))
      throw NumericError("conditional_sample: conditioning point must be interior");
  if (B < 1) throw DataError("conditional_sample: B must be >= 1");
  RngStream rng = RngStream::from(seed, 0xc0);
  switch (c.family) {
    case CopulaFamily::t:
      return conditional_sample_t(c, u_cond, B, rng);
    case CopulaFamily::clayton:
      return conditional_sample_clayton(c, u_cond, B, rng);
    case CopulaFamily::gumbel:
      return conditional_sample_gumbel(c, u_cond, B, rng);
  }
  throw NumericError("conditional_sample: unknown family");
}

// ---------------------------------------------------------------------------
// Names and serialization
// ---------------------------------------------------------------------------

const char* family_name(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::t: return "t";
    case CopulaFamily::clayton: return "clayton";
    case CopulaFamily::gumbel: return "gumbel";
  }
  return "?";
}

CopulaFamily family_from_name(const std::string& name) {
  if (name == "t") return CopulaFamily::t;
  if (name == "clayton") return CopulaFamily::clayton;
  if (name == "gumbel") return CopulaFamily::gumbel;
  throw DataError("unknown copula family '" + name + "'");
}

std::string copula_to_json(const CopulaModel& c) {
  nlohmann::json j;
  j["family"] = family_name(c.family);
  j["dim"] = c.dim;
  if (c.family == CopulaFamily::t) {
    j["nu"] = c.nu;
    std::vector<double> upper;
    for (int col = 0; col < c.dim; ++col)
      for (int row = 0; row <= col; ++row) upper.push_back(c.corr(row, col));
    j["correlation"] = upper;
  } else {
    j["theta"] = c.theta;
  }
  return j.dump();
}

CopulaModel copula_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CopulaModel c;
  c.family = family_from_name(j.at("family").get<std::string>());
  c.dim = j.at("dim").get<int>();
  if (c.family == CopulaFamily::t) {
    c.nu = j.at("nu").get<double>();
    const auto upper = j.at("correlation").get<std::vector<double>>();
    c.corr = Matrix::Identity(c.dim, c.dim);
    std::size_t k = 0;
    for (int col = 0; col < c.dim; ++col)
      for (int row = 0; row <= col; ++row) {
        if (k >= upper.size()) throw DataError("copula_from_json: truncated correlation");
        c.corr(row, col) = c.corr(col, row) = upper[k++];
      }
  } else {
    c.theta = j.at("theta").get<double>();
  }
  return c;
}

}  // namespace rvcop
