#include "rvcop/margins.hpp"

#include <algorithm>
#include <cmath>

namespace rvcop {

EmpiricalMarginal::EmpiricalMarginal(std::vector<double> samples)
    : sorted_(std::move(samples)) {
  if (sorted_.size() < 2)
    throw DataError("EmpiricalMarginal: need at least 2 samples, got " +
                    std::to_string(sorted_.size()));
  for (double x : sorted_)
    if (!std::isfinite(x)) throw DataError("EmpiricalMarginal: non-finite sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalMarginal::cdf(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / (static_cast<double>(sorted_.size()) + 1.0);
}

double EmpiricalMarginal::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw DataError("EmpiricalMarginal::quantile: u=" + std::to_string(u) +
                    " outside (0,1)");
  const double t1 = static_cast<double>(sorted_.size()) + 1.0;
  // smallest sample whose CDF value r/(T+1) reaches u; clamp beyond the range.
  // The 1e-9 nudge keeps quantile(cdf(x)) == x at sample points despite
  // round-off in u * (T+1).
  long k = static_cast<long>(std::ceil(u * t1 - 1e-9)) - 1;
  k = std::clamp(k, 0L, static_cast<long>(sorted_.size()) - 1);
  return sorted_[static_cast<std::size_t>(k)];
}

}  // namespace rvcop
