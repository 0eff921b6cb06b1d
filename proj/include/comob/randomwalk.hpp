// Random-walk characteristics of visit behavior: the exploration curve
// S(t) (mean distinct communities visited by hour t of a user's own
// activity) and the per-rank visit-frequency curve f_k.
#pragma once

#include <cstdint>
#include <vector>

#include "comob/core.hpp"
#include "comob/distributions.hpp"

namespace comob {

struct ExplorationCurve {
  // s_of_t[i] = S(i+1): mean distinct communities by end of hour i+1,
  // averaged over users whose observed span covers the horizon.
  std::vector<double> s_of_t;
  std::size_t n_users = 0;
};

struct RankFrequencyCurve {
  std::uint32_t s_value = 0;
  // f[k-1] = mean relative frequency of the k-th most visited community.
  std::vector<double> f;
  std::size_t n_users = 0;
};

// Hours count from each user's first visit. Users spanning fewer than
// `horizon_hours` hours are excluded; throws if nobody qualifies.
ExplorationCurve exploration_curve(const TrajectorySet& set,
                                   std::uint32_t horizon_hours, int threads = 1);

// exponent is mu: the slope of log S(t) against log t.
PowerLawFit fit_mu(const ExplorationCurve& curve, FitRange range = {});

// Rank-frequency over users with exactly S distinct communities. Per user,
// communities are ranked by visit count (ties by community name); f_k is
// the mean of relative frequencies at rank k. Throws if nobody qualifies.
RankFrequencyCurve zipf_curve(const TrajectorySet& set, std::uint32_t S,
                              int threads = 1);

// exponent is zeta, the positive decay rate of f_k ~ k^(-zeta).
PowerLawFit fit_zeta(const RankFrequencyCurve& curve, FitRange range = {});

namespace serial {
// Reference kernel: per-user distinct-count accumulation, single pass.
// Returns the per-hour sums of s(t) and the number of qualifying users.
std::pair<std::vector<std::int64_t>, std::size_t> exploration_sums(
    const TrajectorySet& set, std::uint32_t horizon_hours);
}  // namespace serial

}  // namespace comob
