#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rvcop/common.hpp"

namespace rvcop {

enum class CopulaFamily { t, clayton, gumbel };

const char* family_name(CopulaFamily f);
CopulaFamily family_from_name(const std::string& name);

/// A fitted copula. Student-t carries a correlation matrix and degrees of
/// freedom; Clayton and Gumbel are exchangeable with a single theta
/// (Gumbel is offered bivariately only).
struct CopulaModel {
  CopulaFamily family;
  int dim;
  Matrix corr;          // t only, unit diagonal, PD
  double nu = 0.0;      // t only, in [2.1, 200]
  double theta = 0.0;   // clayton (>0) / gumbel (>=1)
  double loglik = 0.0;  // attained at the fitted parameters
  bool boundary = false;  // parameter pinned at a bound, or correlation repaired
};

struct FitOptions {
  /// When the pseudo-observations are empirical-CDF ranks r/(G+1) on a grid
  /// of size G, setting rank_grid = G lets the t profile likelihood tabulate
  /// quantile transforms once per candidate nu instead of per entry.
  int rank_grid = 0;
};

/// Fits a copula on pseudo-observations (rows = samples, columns = margins,
/// entries strictly inside (0,1)).
///   t:       pairwise Kendall-tau inversion + PD projection, then a
///            golden-section profile likelihood over nu in [2.1, 200].
///   clayton: 1-D likelihood maximization over theta in [1e-4, 50].
///   gumbel:  over theta in [1, 50]; dim must be 2.
CopulaModel fit_copula(CopulaFamily family, const Matrix& u, const FitOptions& opts = {});

double copula_log_density(const CopulaModel& c, const Vector& u);
double copula_density(const CopulaModel& c, const Vector& u);

/// Total copula log likelihood of a pseudo-sample under the model.
double copula_log_likelihood(const CopulaModel& c, const Matrix& u);

/// B unconditional draws (B x dim). t: correlated t draws through the
/// univariate t CDF; clayton/gumbel: Marshall-Olkin frailty construction.
Matrix sample_copula(const CopulaModel& c, int B, std::uint64_t seed);

/// B draws of the trailing dim-d1 block conditional on the leading block
/// fixed at u_cond (d1 = u_cond.size()). t uses the closed-form conditional
/// t distribution; clayton inverts the exchangeable conditional CDFs by
/// bracketed root-finding; gumbel (bivariate) inverts dC/du1 numerically.
Matrix conditional_sample(const CopulaModel& c, const Vector& u_cond, int B,
                          std::uint64_t seed);

/// Kendall's tau-b (tie-adjusted), O(N log N).
double kendall_tau(const Vector& x, const Vector& y);
Matrix kendall_tau_matrix(const Matrix& columns);

/// Closed-form tau as a function of the family parameter:
/// t: (2/pi) asin(rho); clayton: theta/(theta+2); gumbel: 1 - 1/theta.
double tau_from_rho_t(double rho);
double tau_clayton(double theta);
double tau_gumbel(double theta);

/// Nearest-PD repair used after tau inversion: eigenvalues clipped at 1e-6,
/// then rescaled to unit diagonal. Returns true if clipping occurred.
bool project_to_correlation(Matrix& r);

/// JSON serialization: {family, dim, nu?, theta?, correlation (upper triangle)}.
std::string copula_to_json(const CopulaModel& c);
CopulaModel copula_from_json(const std::string& text);

/// Univariate Student-t helpers shared with the conditional machinery.
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);
double student_t_log_pdf(double x, double nu);

}  // namespace rvcop
