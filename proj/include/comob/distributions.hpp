// Visit-count histograms, complementary CDFs, and power-law tail fits.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "comob/core.hpp"

namespace comob {

struct CountHistogram {
  // (key, count) with count > 0, ordered by key name.
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::uint64_t total = 0;
};

struct CcdfPoint {
  std::uint64_t value;
  double prob;  // P(X >= value), X = count of a uniformly random key
};

struct CcdfCurve {
  std::vector<CcdfPoint> points;  // values strictly increasing, prob non-increasing
};

struct PowerLawFit {
  double exponent = 0;   // slope in log10-log10 space
  double intercept = 0;
  double r_squared = 0;
  double range_min = 0;  // fit range actually applied
  double range_max = 0;
  std::size_t n_points = 0;
};

// Inclusive bounds on the x value; defaults cover everything.
struct FitRange {
  double min_value = 0;
  double max_value = 1e300;
};

CountHistogram community_visit_counts(const TrajectorySet& set, int threads = 1);
CountHistogram user_visit_counts(const TrajectorySet& set, int threads = 1);

// Throws on an empty histogram.
CcdfCurve ccdf(const CountHistogram& hist);

// Ordinary least squares of log10(y) on log10(x) over points inside `range`.
// Needs at least 3 usable points with x > 0 and y > 0.
PowerLawFit fit_loglog(std::span<const std::pair<double, double>> points,
                       FitRange range = {});

inline std::vector<std::pair<double, double>> ccdf_points(const CcdfCurve& curve) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size());
  for (const CcdfPoint& p : curve.points)
    pts.emplace_back(static_cast<double>(p.value), p.prob);
  return pts;
}

namespace serial {
// Reference counting kernel: plain single pass, no threading.
std::vector<std::uint64_t> community_count_kernel(const TrajectorySet& set);
}  // namespace serial

}  // namespace comob
