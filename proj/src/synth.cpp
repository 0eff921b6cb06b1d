#include "comob/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "comob/rng.hpp"

namespace comob {

namespace {

std::string fmt(const char* pattern, unsigned long long a, unsigned long long b = 0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return std::string(buf);
}

}  // namespace

EventLog simulate_epr(const EprParams& params, std::uint32_t n_users, int threads) {
  require(params.rho > 0.0 && params.rho <= 1.0, "simulate_epr: rho in (0,1]");
  require(params.gamma >= 0.0, "simulate_epr: gamma must be >= 0");
  require(params.n_steps >= 1, "simulate_epr: n_steps must be >= 1");
  require(params.inter_event_seconds >= 1, "simulate_epr: spacing must be >= 1");

  const std::size_t n_steps = params.n_steps;
  // Phase 1, parallel per user: community ordinals (index in the user's
  // own discovery order) and timestamps.
  std::vector<std::uint32_t> ordinals(static_cast<std::size_t>(n_users) * n_steps);
  std::vector<std::int64_t> stamps(static_cast<std::size_t>(n_users) * n_steps);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::int64_t u = 0; u < static_cast<std::int64_t>(n_users); ++u) {
    std::mt19937_64 rng(derive_seed(params.seed, static_cast<std::uint64_t>(u)));
    std::uint32_t* ord = ordinals.data() + static_cast<std::size_t>(u) * n_steps;
    std::int64_t* ts = stamps.data() + static_cast<std::size_t>(u) * n_steps;
    std::uint32_t distinct = 0;
    std::int64_t t = params.start_ts;
    for (std::size_t step = 0; step < n_steps; ++step) {
      if (step == 0 ||
          uniform01(rng) <
              params.rho * std::pow(static_cast<double>(distinct), -params.gamma)) {
        ord[step] = distinct++;
      } else {
        // A uniformly random past visit revisits its community with
        // probability proportional to the community's visit count.
        ord[step] = ord[uniform_below(rng, step)];
      }
      ts[step] = t;
      if (params.poisson_arrivals) {
        const double gap =
            -std::log(1.0 - uniform01(rng)) *
            static_cast<double>(params.inter_event_seconds);
        t += std::max<std::int64_t>(1, static_cast<std::int64_t>(gap));
      } else {
        t += params.inter_event_seconds;
      }
    }
  }

  // Phase 2, serial: intern names in user order.
  EventLog log;
  log.events.reserve(static_cast<std::size_t>(n_users) * n_steps);
  for (std::uint32_t u = 0; u < n_users; ++u) {
    const Id user = log.users.intern(fmt("u%06llu", u));
    std::vector<Id> comm_ids;
    const std::uint32_t* ord = ordinals.data() + static_cast<std::size_t>(u) * n_steps;
    const std::int64_t* ts = stamps.data() + static_cast<std::size_t>(u) * n_steps;
    for (std::size_t step = 0; step < n_steps; ++step) {
      while (comm_ids.size() <= ord[step])
        comm_ids.push_back(
            log.communities.intern(fmt("u%06llu_c%04llu", u, comm_ids.size())));
      log.events.push_back({user, comm_ids[ord[step]], ts[step]});
    }
  }
  return log;
}

EventLog simulate_zipf_users(std::uint32_t S, double zeta,
                             std::uint32_t visits_per_user, std::uint32_t n_users,
                             std::uint64_t seed) {
  require(S >= 2, "simulate_zipf_users: S must be >= 2");
  require(zeta >= 0.0, "simulate_zipf_users: zeta must be >= 0");
  if (visits_per_user < S)
    throw std::invalid_argument("simulate_zipf_users: visits_per_user < S");

  // Exact normalized law over ranks 1..S, as a cumulative table.
  std::vector<double> cdf(S);
  double z = 0.0;
  for (std::uint32_t k = 0; k < S; ++k) {
    z += std::pow(static_cast<double>(k + 1), -zeta);
    cdf[k] = z;
  }
  for (double& v : cdf) v /= z;

  EventLog log;
  std::vector<Id> comms(S);
  for (std::uint32_t c = 0; c < S; ++c)
    comms[c] = log.communities.intern(fmt("z_c%03llu", c));

  log.events.reserve(static_cast<std::size_t>(n_users) * visits_per_user);
  std::vector<std::uint32_t> perm(S);
  for (std::uint32_t u = 0; u < n_users; ++u) {
    std::mt19937_64 rng(derive_seed(seed, u));
    const Id user = log.users.intern(fmt("zu%05llu", u));
    // Per-user mapping rank -> community, so the top community differs
    // across users.
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::uint32_t i = S - 1; i > 0; --i)
      std::swap(perm[i], perm[uniform_below(rng, i + 1)]);

    std::int64_t t = 1420070400;
    // Coverage pass: all S communities once, so the user has exactly S
    // distinct communities regardless of the draws below.
    for (std::uint32_t k = 0; k < S; ++k) {
      log.events.push_back({user, comms[perm[k]], t});
      t += 3600;
    }
    for (std::uint32_t v = S; v < visits_per_user; ++v) {
      const double r = uniform01(rng);
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), r);
      const std::uint32_t rank =
          static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), S - 1));
      log.events.push_back({user, comms[perm[rank]], t});
      t += 3600;
    }
  }
  return log;
}

EventLog simulate_periodic_returners(const PeriodicParams& params) {
  require(params.period_hours >= 1, "simulate_periodic_returners: period >= 1 hour");
  require(params.jitter_seconds >= 0, "simulate_periodic_returners: jitter >= 0");
  require(params.jitter_seconds < params.period_hours * 3600LL,
          "simulate_periodic_returners: jitter must be below the period");
  require(params.attend_prob > 0.0 && params.attend_prob <= 1.0,
          "simulate_periodic_returners: attend_prob in (0,1]");

  const std::int64_t period = static_cast<std::int64_t>(params.period_hours) * 3600;
  EventLog log;
  log.events.reserve(static_cast<std::size_t>(params.n_users) * params.n_visits);
  for (std::uint32_t u = 0; u < params.n_users; ++u) {
    std::mt19937_64 rng(derive_seed(params.seed, u));
    const Id user = log.users.intern(fmt("pu%05llu", u));
    const Id home = log.communities.intern(fmt("ph%05llu", u));
    std::int64_t t =
        params.start_ts + static_cast<std::int64_t>(uniform_below(rng, 86400));
    for (std::uint32_t v = 0; v < params.n_visits; ++v) {
      log.events.push_back({user, home, t});
      std::int64_t skip = 1;
      while (skip < 10 && uniform01(rng) >= params.attend_prob) ++skip;
      std::int64_t gap = skip * period;
      if (params.jitter_seconds > 0)
        gap -= static_cast<std::int64_t>(
            uniform_below(rng, static_cast<std::uint64_t>(params.jitter_seconds) + 1));
      t += gap;
    }
  }
  return log;
}

std::vector<CohortSpec> default_cohort_specs(std::uint32_t users_per_cohort,
                                             std::uint64_t seed) {
  CohortSpec expl1;
  expl1.pattern = PatternLabel::ExploratoryI;
  expl1.n_users = users_per_cohort;
  expl1.p_new_start = 0.02;
  expl1.p_new_end = 0.55;
  expl1.focus_start = 0.92;
  expl1.focus_end = 0.06;
  expl1.pool_size = 400;
  expl1.seed = derive_seed(seed, 101);

  CohortSpec expl2 = expl1;
  expl2.pattern = PatternLabel::ExploratoryII;
  std::swap(expl2.p_new_start, expl2.p_new_end);
  std::swap(expl2.focus_start, expl2.focus_end);
  expl2.seed = derive_seed(seed, 202);

  CohortSpec conc;
  conc.pattern = PatternLabel::Concentrated;
  conc.n_users = users_per_cohort;
  conc.p_new_start = 0.008;
  conc.p_new_end = 0.008;
  conc.focus_start = 0.96;
  conc.focus_end = 0.96;
  conc.pool_size = 120;
  conc.seed = derive_seed(seed, 303);

  return {expl1, expl2, conc};
}

namespace {

const char* cohort_prefix(PatternLabel label) {
  switch (label) {
    case PatternLabel::ExploratoryI: return "e1";
    case PatternLabel::ExploratoryII: return "e2";
    case PatternLabel::Concentrated: return "cc";
  }
  return "??";
}

}  // namespace

CohortData simulate_pattern_cohorts(const std::vector<CohortSpec>& specs,
                                    std::uint32_t visits_per_user,
                                    std::uint32_t shared_pool_size,
                                    std::int64_t start_ts) {
  require(!specs.empty(), "simulate_pattern_cohorts: no cohorts");
  if (visits_per_user < 400)
    throw std::invalid_argument(
        "simulate_pattern_cohorts: need at least 400 visits per user");
  for (const CohortSpec& spec : specs) {
    require(spec.p_new_start >= 0 && spec.p_new_start <= 1 && spec.p_new_end >= 0 &&
                spec.p_new_end <= 1,
            "simulate_pattern_cohorts: p_new out of [0,1]");
    require(spec.focus_start >= 0 && spec.focus_start <= 1 && spec.focus_end >= 0 &&
                spec.focus_end <= 1,
            "simulate_pattern_cohorts: focus out of [0,1]");
    require(spec.pool_size >= 3, "simulate_pattern_cohorts: pool too small");
  }

  CohortData data;
  std::vector<Id> shared(shared_pool_size);
  for (std::uint32_t c = 0; c < shared_pool_size; ++c)
    shared[c] = data.events.communities.intern(fmt("g_c%03llu", c));

  std::vector<Id> seen;  // user's communities in discovery order
  for (const CohortSpec& spec : specs) {
    const char* pfx = cohort_prefix(spec.pattern);
    std::vector<Id> pool(spec.pool_size);
    for (std::uint32_t c = 0; c < spec.pool_size; ++c)
      pool[c] = data.events.communities.intern(
          fmt((std::string(pfx) + "p_c%03llu").c_str(), c));

    for (std::uint32_t u = 0; u < spec.n_users; ++u) {
      std::mt19937_64 rng(derive_seed(spec.seed, u));
      const std::string user_name = fmt((std::string(pfx) + "u%05llu").c_str(), u);
      const Id user = data.events.users.intern(user_name);
      data.labels.emplace_back(user_name, spec.pattern);

      seen.clear();
      std::uint32_t fresh = 0;  // fallback namespace when pools run dry
      std::int64_t t = start_ts;
      const double denom = static_cast<double>(visits_per_user - 1);

      auto explore = [&](double r) -> Id {
        const std::vector<Id>& src = r < 0.75 ? pool : shared;
        std::size_t at = uniform_below(rng, src.size());
        for (std::size_t tries = 0; tries < src.size(); ++tries) {
          const Id cand = src[(at + tries) % src.size()];
          if (std::find(seen.begin(), seen.end(), cand) == seen.end()) return cand;
        }
        return data.events.communities.intern(
            fmt((std::string(pfx) + "x%05llu_n%04llu").c_str(), u, fresh++));
      };

      for (std::uint32_t v = 0; v < visits_per_user; ++v) {
        const double x = static_cast<double>(v) / denom;
        const double p_new = spec.p_new_start + x * (spec.p_new_end - spec.p_new_start);
        const double focus = spec.focus_start + x * (spec.focus_end - spec.focus_start);
        Id community;
        // The first three visits always explore, so every user clears the
        // distinct-community activity threshold.
        if (v < 3 || uniform01(rng) < p_new) {
          community = explore(uniform01(rng));
          seen.push_back(community);
        } else if (uniform01(rng) < focus) {
          community = seen.front();  // home = first community discovered
        } else {
          community = seen[uniform_below(rng, seen.size())];
        }
        data.events.events.push_back({user, community, t});
        t += 3600;
      }
    }
  }
  return data;
}

}  // namespace comob
