#include "comob/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace comob {

namespace serial {

std::vector<std::uint64_t> community_count_kernel(const TrajectorySet& set) {
  std::vector<std::uint64_t> counts(set.communities.size(), 0);
  for (const Trajectory& traj : set.trajectories)
    for (const Visit& v : traj.visits) counts[v.community]++;
  return counts;
}

}  // namespace serial

namespace {

std::vector<std::uint64_t> community_count_parallel(const TrajectorySet& set,
                                                    int threads) {
  const std::size_t n = set.communities.size();
  std::vector<std::uint64_t> counts(n, 0);
#pragma omp parallel num_threads(threads)
  {
    std::vector<std::uint64_t> local(n, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(set.trajectories.size());
         ++i)
      for (const Visit& v : set.trajectories[i].visits) local[v.community]++;
#pragma omp critical
    for (std::size_t c = 0; c < n; ++c) counts[c] += local[c];
  }
  return counts;
}

CountHistogram histogram_from_counts(const StringPool& pool,
                                     const std::vector<std::uint64_t>& counts) {
  CountHistogram hist;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) {
      hist.entries.emplace_back(pool.name(static_cast<Id>(i)), counts[i]);
      hist.total += counts[i];
    }
  std::sort(hist.entries.begin(), hist.entries.end());
  return hist;
}

}  // namespace

CountHistogram community_visit_counts(const TrajectorySet& set, int threads) {
  const auto counts = threads > 1 ? community_count_parallel(set, threads)
                                  : serial::community_count_kernel(set);
  return histogram_from_counts(set.communities, counts);
}

CountHistogram user_visit_counts(const TrajectorySet& set, int threads) {
  (void)threads;  // per-user counts are trivially the trajectory lengths
  CountHistogram hist;
  hist.entries.reserve(set.trajectories.size());
  for (const Trajectory& traj : set.trajectories) {
    hist.entries.emplace_back(set.users.name(traj.user), traj.visits.size());
    hist.total += traj.visits.size();
  }
  std::sort(hist.entries.begin(), hist.entries.end());
  return hist;
}

CcdfCurve ccdf(const CountHistogram& hist) {
  if (hist.entries.empty()) throw std::invalid_argument("ccdf: empty histogram");
  std::map<std::uint64_t, std::uint64_t> keys_per_value;
  for (const auto& [key, count] : hist.entries) keys_per_value[count]++;

  const double n_keys = static_cast<double>(hist.entries.size());
  CcdfCurve curve;
  curve.points.reserve(keys_per_value.size());
  std::uint64_t at_least = hist.entries.size();
  for (const auto& [value, n] : keys_per_value) {
    curve.points.push_back({value, static_cast<double>(at_least) / n_keys});
    at_least -= n;
  }
  return curve;
}

PowerLawFit fit_loglog(std::span<const std::pair<double, double>> points,
                       FitRange range) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (x < range.min_value || x > range.max_value) continue;
    if (x <= 0.0 || y <= 0.0) continue;
    logs.emplace_back(std::log10(x), std::log10(y));
  }
  if (logs.size() < 3)
    throw std::invalid_argument("fit_loglog: need at least 3 positive points in range");

  double sx = 0, sy = 0;
  for (const auto& [lx, ly] : logs) {
    sx += lx;
    sy += ly;
  }
  const double n = static_cast<double>(logs.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [lx, ly] : logs) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_loglog: degenerate x range");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.n_points = logs.size();
  fit.range_min = range.min_value;
  fit.range_max = range.max_value;

  double ss_res = 0, ss_tot = 0;
  for (const auto& [lx, ly] : logs) {
    const double pred = fit.intercept + fit.exponent * lx;
    ss_res += (ly - pred) * (ly - pred);
    ss_tot += (ly - my) * (ly - my);
  }
  // A flat series fit exactly still counts as a perfect fit.
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace comob
