#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rvcop/common.hpp"

namespace rvcop {

struct ScalarMin {
  double x;
  double fx;
};

/// Golden-section minimization of a unimodal f on [a, b].
template <typename F>
ScalarMin golden_section_min(F&& f, double a, double b, double xtol = 1e-6,
                             int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? ScalarMin{x1, f1} : ScalarMin{x2, f2};
}

/// Brent's method for a root of f on a bracketing interval [a, b]
/// (f(a) and f(b) of opposite sign). Throws NumericError if the bracket is
/// invalid or the iteration budget runs out.
template <typename F>
double brent_root(F&& f, double a, double b, double xtol = 1e-12,
                  int max_iter = 200, const char* what = "brent_root") {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw NumericError(std::string(what) + ": root not bracketed on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // inverse quadratic / secant step
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericError(std::string(what) + ": no convergence after " +
                     std::to_string(max_iter) + " iterations");
}

struct NelderMeadResult {
  std::vector<double> x;
  double fx = std::numeric_limits<double>::infinity();
  int evals = 0;
};

/// Derivative-free simplex minimization. Objectives signal infeasible points
/// by returning +infinity (or any huge value); the simplex contracts away.
template <typename F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0,
                             const std::vector<double>& step, double ftol = 1e-10,
                             int max_iter = 500) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fvals(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) fvals[i] = eval(simplex[i]);

  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (int it = 0; it < max_iter; ++it) {
    // order: best first
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fvals[a] < fvals[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = simplex[idx[i]];
      f2[i] = fvals[idx[i]];
    }
    simplex.swap(s2);
    fvals.swap(f2);
    if (std::fabs(fvals[n] - fvals[0]) <= ftol * (std::fabs(fvals[0]) + ftol)) break;

    for (std::size_t j = 0; j < n; ++j) {
      centroid[j] = 0.0;
      for (std::size_t i = 0; i < n; ++i) centroid[j] += simplex[i][j];
      centroid[j] /= static_cast<double>(n);
    }
    for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[n][j]);
    double fr = eval(xr);
    if (fr < fvals[0]) {
      for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - simplex[n][j]);
      double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fvals[n] = fe;
      } else {
        simplex[n] = xr;
        fvals[n] = fr;
      }
    } else if (fr < fvals[n - 1]) {
      simplex[n] = xr;
      fvals[n] = fr;
    } else {
      const bool outside = fr < fvals[n];
      const std::vector<double>& base = outside ? xr : simplex[n];
      for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + 0.5 * (base[j] - centroid[j]);
      double fc = eval(xc);
      if (fc < std::min(fr, fvals[n])) {
        simplex[n] = xc;
        fvals[n] = fc;
      } else {
        // shrink toward best
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fvals[i] = eval(simplex[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fvals[i] < fvals[best]) best = i;
  return NelderMeadResult{simplex[best], fvals[best], evals};
}

}  // namespace rvcop
