#ifndef DCFCOEX_STATS_HPP_
#define DCFCOEX_STATS_HPP_

#include <cmath>
#include <limits>
#include <optional>
#include <span>

#include <boost/math/distributions/students_t.hpp>

namespace dcfcoex {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Half-width of the two-sided 95% Student-t interval of the mean; empty
/// with fewer than two samples.
inline std::optional<double> ci95_half_width(std::span<const double> xs) {
  if (xs.size() < 2) return std::nullopt;
  const boost::math::students_t dist(static_cast<double>(xs.size() - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return t * sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

/// |model - sim| / sim * 100.
inline double percentage_error(double model, double sim) {
  if (sim == 0.0) return model == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(model - sim) / sim * 100.0;
}

}  // namespace dcfcoex

#endif  // DCFCOEX_STATS_HPP_
