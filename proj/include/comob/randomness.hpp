// Per-user mobility-randomness metrics: Shannon entropy (base 2) of the
// community-visit distribution and the relative frequency of the most
// visited community.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "comob/core.hpp"

namespace comob {

struct VisitDistribution {
  Id user = 0;
  // (community, p) with p = count / total_visits, ordered by community id.
  std::vector<std::pair<Id, double>> probs;
  std::uint32_t n = 0;  // distinct communities
  std::uint64_t total_visits = 0;
};

VisitDistribution visit_distribution(const Trajectory& traj);

double entropy_bits(const VisitDistribution& dist);
double max_frq(const VisitDistribution& dist);

struct UserRandomness {
  Id user = 0;
  double entropy = 0;
  double max_frq = 0;
  std::uint32_t n = 0;
  std::uint64_t total_visits = 0;
};

std::vector<UserRandomness> user_randomness(const TrajectorySet& set,
                                            int threads = 1);

// Keeps users with distinct communities > min_distinct and total visits
// > min_visits (both strict).
void active_filter(TrajectorySet& set, std::uint32_t min_distinct = 2,
                   std::uint64_t min_visits = 1000);

struct ValueCcdf {
  std::vector<std::pair<double, double>> points;  // (v, P(X >= v))
};

struct RandomnessDistribution {
  ValueCcdf entropy_ccdf;
  ValueCcdf max_frq_ccdf;
  std::size_t n_users = 0;
  // Shares of users beyond the reference thresholds.
  double frac_entropy_gt_4 = 0;
  double frac_entropy_lt_1 = 0;
  double frac_max_frq_gt_08 = 0;
  double frac_max_frq_gt_09 = 0;
  double frac_max_frq_lt_03 = 0;
};

RandomnessDistribution randomness_distribution(
    const std::vector<UserRandomness>& users);

namespace serial {
std::vector<UserRandomness> user_randomness_kernel(const TrajectorySet& set);
}  // namespace serial

}  // namespace comob
