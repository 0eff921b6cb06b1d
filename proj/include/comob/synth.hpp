// Seeded synthetic-trajectory generators. These exist to give every
// estimator an independent oracle: each generator targets a known law, so
// the estimators can be checked against the parameters that produced the
// data. Identical seeds give byte-identical output.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "comob/core.hpp"
#include "comob/patterns.hpp"

namespace comob {

// Exploration / preferential-return walk. Each step explores a brand-new
// community with probability rho * S^(-gamma) (S = communities seen so
// far), otherwise revisits one with probability proportional to its past
// visit count. Distinct communities grow as S(t) ~ t^(1/(1+gamma)).
struct EprParams {
  double rho = 0.6;
  double gamma = 1.5;
  std::uint32_t n_steps = 2000;
  std::int64_t inter_event_seconds = 3600;
  bool poisson_arrivals = false;  // exponential gaps with the same mean
  std::int64_t start_ts = 1420070400;
  std::uint64_t seed = 1;
};

EventLog simulate_epr(const EprParams& params, std::uint32_t n_users,
                      int threads = 1);

// Every user draws visits from the exact Zipf(zeta) law over S shared
// communities through a per-user rank permutation. The first S visits
// enumerate all S communities once so each user has exactly S distinct
// communities. Throws when visits_per_user < S.
EventLog simulate_zipf_users(std::uint32_t S, double zeta,
                             std::uint32_t visits_per_user, std::uint32_t n_users,
                             std::uint64_t seed);

// Each user returns to one home community on a period grid, skipping a
// slot with probability 1 - attend_prob. Jitter pulls a visit up to
// `jitter_seconds` earlier, so a gap stays inside its period's hour bin
// (symmetric jitter would straddle the bin edge, since the period is
// exactly the bin boundary).
struct PeriodicParams {
  std::uint32_t n_users = 100;
  std::uint32_t period_hours = 24;
  std::int64_t jitter_seconds = 0;
  std::uint32_t n_visits = 100;
  double attend_prob = 0.7;
  std::int64_t start_ts = 1420070400;
  std::uint64_t seed = 1;
};

EventLog simulate_periodic_returners(const PeriodicParams& params);

// One cohort of users sharing a mobility archetype. p_new_* is the
// per-visit probability of exploring an unseen community, interpolated
// linearly over the lifespan; focus_* is the share of revisits going to
// the user's home community (high focus = low entropy).
struct CohortSpec {
  PatternLabel pattern = PatternLabel::Concentrated;
  std::uint32_t n_users = 2000;
  double p_new_start = 0.01, p_new_end = 0.01;
  double focus_start = 0.9, focus_end = 0.9;
  std::uint32_t pool_size = 120;  // cohort-specific community pool
  std::uint64_t seed = 1;
};

// The canonical three cohorts (rising-, falling-, and flat-exploration).
std::vector<CohortSpec> default_cohort_specs(std::uint32_t users_per_cohort,
                                             std::uint64_t seed);

struct CohortData {
  EventLog events;
  std::vector<std::pair<std::string, PatternLabel>> labels;  // user -> truth
};

// Cohort users draw exploration targets mostly from their cohort's pool
// (plus a shared pool), so community choice carries the pattern signal the
// preference classifier needs. Throws when visits_per_user < 400.
CohortData simulate_pattern_cohorts(const std::vector<CohortSpec>& specs,
                                    std::uint32_t visits_per_user = 1200,
                                    std::uint32_t shared_pool_size = 200,
                                    std::int64_t start_ts = 1420070400);

}  // namespace comob
