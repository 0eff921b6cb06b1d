#include "comob/randomwalk.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace comob {

namespace {

inline std::int64_t span_hours(const Trajectory& traj) {
  return (traj.visits.back().ts - traj.visits.front().ts) / 3600 + 1;
}

inline std::int64_t visit_hour(std::int64_t ts, std::int64_t first_ts) {
  return (ts - first_ts) / 3600 + 1;
}

}  // namespace

namespace serial {

std::pair<std::vector<std::int64_t>, std::size_t> exploration_sums(
    const TrajectorySet& set, std::uint32_t horizon_hours) {
  std::vector<std::int64_t> sums(horizon_hours, 0);
  std::size_t n_users = 0;
  for (const Trajectory& traj : set.trajectories) {
    if (span_hours(traj) < static_cast<std::int64_t>(horizon_hours)) continue;
    ++n_users;
    std::unordered_set<Id> seen;
    const std::int64_t first_ts = traj.visits.front().ts;
    std::size_t vi = 0;
    std::int64_t distinct = 0;
    for (std::uint32_t h = 1; h <= horizon_hours; ++h) {
      while (vi < traj.visits.size() &&
             visit_hour(traj.visits[vi].ts, first_ts) <= static_cast<std::int64_t>(h)) {
        if (seen.insert(traj.visits[vi].community).second) ++distinct;
        ++vi;
      }
      sums[h - 1] += distinct;
    }
  }
  return {std::move(sums), n_users};
}

}  // namespace serial

namespace {

// Same accumulation as the serial reference, with per-thread partial sums
// (integer, so merge order cannot change the result) and an epoch-stamped
// seen-array instead of a hash set.
std::pair<std::vector<std::int64_t>, std::size_t> exploration_sums_parallel(
    const TrajectorySet& set, std::uint32_t horizon_hours, int threads) {
  std::vector<std::int64_t> sums(horizon_hours, 0);
  std::size_t n_users = 0;
#pragma omp parallel num_threads(threads)
  {
    std::vector<std::int64_t> local(horizon_hours, 0);
    std::vector<std::uint32_t> stamp(set.communities.size(), 0);
    std::uint32_t epoch = 0;
    std::size_t local_users = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(set.trajectories.size());
         ++i) {
      const Trajectory& traj = set.trajectories[i];
      if (span_hours(traj) < static_cast<std::int64_t>(horizon_hours)) continue;
      ++local_users;
      ++epoch;
      const std::int64_t first_ts = traj.visits.front().ts;
      std::size_t vi = 0;
      std::int64_t distinct = 0;
      for (std::uint32_t h = 1; h <= horizon_hours; ++h) {
        while (vi < traj.visits.size() &&
               visit_hour(traj.visits[vi].ts, first_ts) <=
                   static_cast<std::int64_t>(h)) {
          if (stamp[traj.visits[vi].community] != epoch) {
            stamp[traj.visits[vi].community] = epoch;
            ++distinct;
          }
          ++vi;
        }
        local[h - 1] += distinct;
      }
    }
#pragma omp critical
    {
      for (std::uint32_t h = 0; h < horizon_hours; ++h) sums[h] += local[h];
      n_users += local_users;
    }
  }
  return {std::move(sums), n_users};
}

}  // namespace

ExplorationCurve exploration_curve(const TrajectorySet& set,
                                   std::uint32_t horizon_hours, int threads) {
  require(horizon_hours >= 1, "exploration_curve: horizon must be >= 1");
  auto [sums, n_users] = threads > 1
                             ? exploration_sums_parallel(set, horizon_hours, threads)
                             : serial::exploration_sums(set, horizon_hours);
  if (n_users == 0)
    throw std::invalid_argument("exploration_curve: no user spans the horizon");
  ExplorationCurve curve;
  curve.n_users = n_users;
  curve.s_of_t.resize(horizon_hours);
  for (std::uint32_t h = 0; h < horizon_hours; ++h)
    curve.s_of_t[h] = static_cast<double>(sums[h]) / static_cast<double>(n_users);
  return curve;
}

PowerLawFit fit_mu(const ExplorationCurve& curve, FitRange range) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.s_of_t.size());
  for (std::size_t i = 0; i < curve.s_of_t.size(); ++i)
    pts.emplace_back(static_cast<double>(i + 1), curve.s_of_t[i]);
  return fit_loglog(pts, range);
}

RankFrequencyCurve zipf_curve(const TrajectorySet& set, std::uint32_t S,
                              int threads) {
  require(S >= 2, "zipf_curve: S must be >= 2");

  std::vector<std::size_t> qualifying;
  for (std::size_t i = 0; i < set.trajectories.size(); ++i) {
    const Trajectory& traj = set.trajectories[i];
    std::unordered_set<Id> distinct;
    for (const Visit& v : traj.visits) distinct.insert(v.community);
    if (distinct.size() == S) qualifying.push_back(i);
  }
  if (qualifying.empty())
    throw std::invalid_argument("zipf_curve: no user with exactly S distinct communities");

  // Per-user rank rows are filled independently, then reduced in a fixed
  // order so the mean does not depend on the thread count.
  std::vector<double> rows(qualifying.size() * S);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::int64_t q = 0; q < static_cast<std::int64_t>(qualifying.size()); ++q) {
    const Trajectory& traj = set.trajectories[qualifying[q]];
    std::vector<std::pair<Id, std::uint64_t>> counts;
    {
      std::vector<Id> ids;
      ids.reserve(traj.visits.size());
      for (const Visit& v : traj.visits) ids.push_back(v.community);
      std::sort(ids.begin(), ids.end());
      for (std::size_t i = 0; i < ids.size();) {
        std::size_t j = i;
        while (j < ids.size() && ids[j] == ids[i]) ++j;
        counts.emplace_back(ids[i], j - i);
        i = j;
      }
    }
    std::sort(counts.begin(), counts.end(), [&](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return set.communities.name(a.first) < set.communities.name(b.first);
    });
    const double total = static_cast<double>(traj.visits.size());
    for (std::uint32_t k = 0; k < S; ++k)
      rows[static_cast<std::size_t>(q) * S + k] =
          static_cast<double>(counts[k].second) / total;
  }

  RankFrequencyCurve curve;
  curve.s_value = S;
  curve.n_users = qualifying.size();
  curve.f.assign(S, 0.0);
  for (std::size_t q = 0; q < qualifying.size(); ++q)
    for (std::uint32_t k = 0; k < S; ++k) curve.f[k] += rows[q * S + k];
  for (std::uint32_t k = 0; k < S; ++k)
    curve.f[k] /= static_cast<double>(qualifying.size());
  return curve;
}

PowerLawFit fit_zeta(const RankFrequencyCurve& curve, FitRange range) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.f.size());
  for (std::size_t k = 0; k < curve.f.size(); ++k)
    pts.emplace_back(static_cast<double>(k + 1), curve.f[k]);
  PowerLawFit fit = fit_loglog(pts, range);
  // f_k ~ k^(-zeta): report the positive decay rate.
  fit.exponent = -fit.exponent;
  return fit;
}

}  // namespace comob
