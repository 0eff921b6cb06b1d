#include "comob/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace comob {

namespace {

// Sorted run-length count of the trajectory's community ids.
std::vector<std::pair<Id, std::uint64_t>> visit_counts(const Trajectory& traj) {
  std::vector<Id> ids;
  ids.reserve(traj.visits.size());
  for (const Visit& v : traj.visits) ids.push_back(v.community);
  std::sort(ids.begin(), ids.end());
  std::vector<std::pair<Id, std::uint64_t>> counts;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    counts.emplace_back(ids[i], j - i);
    i = j;
  }
  return counts;
}

UserRandomness randomness_of(const Trajectory& traj) {
  const auto counts = visit_counts(traj);
  const double total = static_cast<double>(traj.visits.size());
  double h = 0.0;
  std::uint64_t max_count = 0;
  for (const auto& [id, count] : counts) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
    max_count = std::max(max_count, count);
  }
  UserRandomness r;
  r.user = traj.user;
  r.entropy = std::max(h, 0.0);  // clamp the -0.0 of a single community
  r.max_frq = static_cast<double>(max_count) / total;
  r.n = static_cast<std::uint32_t>(counts.size());
  r.total_visits = traj.visits.size();
  return r;
}

}  // namespace

VisitDistribution visit_distribution(const Trajectory& traj) {
  require(!traj.visits.empty(), "visit_distribution: empty trajectory");
  const auto counts = visit_counts(traj);
  VisitDistribution dist;
  dist.user = traj.user;
  dist.total_visits = traj.visits.size();
  dist.n = static_cast<std::uint32_t>(counts.size());
  dist.probs.reserve(counts.size());
  const double total = static_cast<double>(dist.total_visits);
  for (const auto& [id, count] : counts)
    dist.probs.emplace_back(id, static_cast<double>(count) / total);
  return dist;
}

double entropy_bits(const VisitDistribution& dist) {
  double h = 0.0;
  for (const auto& [id, p] : dist.probs) h -= p * std::log2(p);
  return std::max(h, 0.0);
}

double max_frq(const VisitDistribution& dist) {
  double m = 0.0;
  for (const auto& [id, p] : dist.probs) m = std::max(m, p);
  return m;
}

namespace serial {

std::vector<UserRandomness> user_randomness_kernel(const TrajectorySet& set) {
  std::vector<UserRandomness> out(set.trajectories.size());
  for (std::size_t i = 0; i < set.trajectories.size(); ++i)
    out[i] = randomness_of(set.trajectories[i]);
  return out;
}

}  // namespace serial

std::vector<UserRandomness> user_randomness(const TrajectorySet& set, int threads) {
  if (threads <= 1) return serial::user_randomness_kernel(set);
  std::vector<UserRandomness> out(set.trajectories.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(set.trajectories.size());
       ++i)
    out[i] = randomness_of(set.trajectories[i]);
  return out;
}

void active_filter(TrajectorySet& set, std::uint32_t min_distinct,
                   std::uint64_t min_visits) {
  std::erase_if(set.trajectories, [&](const Trajectory& traj) {
    if (traj.visits.size() <= min_visits) return true;
    std::vector<Id> ids;
    ids.reserve(traj.visits.size());
    for (const Visit& v : traj.visits) ids.push_back(v.community);
    std::sort(ids.begin(), ids.end());
    const std::size_t distinct =
        static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
    return distinct <= min_distinct;
  });
}

namespace {

ValueCcdf value_ccdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  ValueCcdf curve;
  const double n = static_cast<double>(values.size());
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    curve.points.emplace_back(values[i],
                              static_cast<double>(values.size() - i) / n);
    i = j;
  }
  return curve;
}

}  // namespace

RandomnessDistribution randomness_distribution(
    const std::vector<UserRandomness>& users) {
  require(!users.empty(), "randomness_distribution: no users");
  RandomnessDistribution dist;
  dist.n_users = users.size();
  std::vector<double> entropies, maxfrqs;
  entropies.reserve(users.size());
  maxfrqs.reserve(users.size());
  std::size_t e_gt4 = 0, e_lt1 = 0, m_gt08 = 0, m_gt09 = 0, m_lt03 = 0;
  for (const UserRandomness& u : users) {
    entropies.push_back(u.entropy);
    maxfrqs.push_back(u.max_frq);
    if (u.entropy > 4.0) ++e_gt4;
    if (u.entropy < 1.0) ++e_lt1;
    if (u.max_frq > 0.8) ++m_gt08;
    if (u.max_frq > 0.9) ++m_gt09;
    if (u.max_frq < 0.3) ++m_lt03;
  }
  const double n = static_cast<double>(users.size());
  dist.entropy_ccdf = value_ccdf(std::move(entropies));
  dist.max_frq_ccdf = value_ccdf(std::move(maxfrqs));
  dist.frac_entropy_gt_4 = e_gt4 / n;
  dist.frac_entropy_lt_1 = e_lt1 / n;
  dist.frac_max_frq_gt_08 = m_gt08 / n;
  dist.frac_max_frq_gt_09 = m_gt09 / n;
  dist.frac_max_frq_lt_03 = m_lt03 / n;
  return dist;
}

}  // namespace comob
