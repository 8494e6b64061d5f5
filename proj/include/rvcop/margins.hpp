#pragma once

#include <vector>

#include "rvcop/common.hpp"

namespace rvcop {

/// Empirical marginal distribution with the T+1 denominator, so the fitted
/// CDF maps the sample range into (0, 1) strictly:
///   F(x) = (1/(T+1)) * #{ samples <= x }.
/// Quantiles are the generalized inverse; arguments beyond T/(T+1) clamp to
/// the sample maximum rather than extrapolating.
class EmpiricalMarginal {
 public:
  explicit EmpiricalMarginal(std::vector<double> samples);

  double cdf(double x) const;
  double quantile(double u) const;

  int size() const { return static_cast<int>(sorted_.size()); }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  const std::vector<double>& sorted_samples() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

}  // namespace rvcop
