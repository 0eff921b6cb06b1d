#include <cmath>
#include <map>
#include <unordered_set>

#include "comob/ingest.hpp"
#include "comob/randomness.hpp"
#include "comob/randomwalk.hpp"
#include "comob/synth.hpp"
#include "comob/temporal.hpp"
#include "doctest.h"

using namespace comob;

namespace {

std::size_t distinct_communities(const Trajectory& traj) {
  std::unordered_set<Id> s;
  for (const Visit& v : traj.visits) s.insert(v.community);
  return s.size();
}

}  // namespace

TEST_CASE("epr limit behaviors") {
  SUBCASE("rho=1, gamma=0 explores every step") {
    EprParams params;
    params.rho = 1.0;
    params.gamma = 0.0;
    params.n_steps = 200;
    const TrajectorySet set = build_trajectories(simulate_epr(params, 5));
    for (const Trajectory& t : set.trajectories)
      CHECK(distinct_communities(t) == 200);
  }
  SUBCASE("vanishing rho pins the walker to its first community") {
    EprParams params;
    params.rho = 1e-12;
    params.n_steps = 500;
    const TrajectorySet set = build_trajectories(simulate_epr(params, 5));
    for (const Trajectory& t : set.trajectories)
      CHECK(distinct_communities(t) == 1);
  }
}

TEST_CASE("epr output is deterministic in the seed") {
  EprParams params;
  params.n_steps = 300;
  params.seed = 77;
  const EventLog a = simulate_epr(params, 20);
  const EventLog b = simulate_epr(params, 20);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.users.name(a.events[i].user) == b.users.name(b.events[i].user));
    CHECK(a.communities.name(a.events[i].community) ==
          b.communities.name(b.events[i].community));
    CHECK(a.events[i].ts == b.events[i].ts);
  }
  params.seed = 78;
  const EventLog c = simulate_epr(params, 20);
  bool same = a.events.size() == c.events.size();
  if (same)
    for (std::size_t i = 0; i < a.events.size(); ++i)
      if (a.communities.name(a.events[i].community) !=
          c.communities.name(c.events[i].community)) {
        same = false;
        break;
      }
  CHECK_FALSE(same);
}

TEST_CASE("epr distinct counts are bounded and mu is recovered at small scale") {
  EprParams params;
  params.rho = 0.6;
  params.gamma = 1.5;
  params.n_steps = 1000;
  params.seed = 5;
  const TrajectorySet set = build_trajectories(simulate_epr(params, 400), 2);
  for (const Trajectory& t : set.trajectories) {
    CHECK(t.visits.size() == 1000);
    CHECK(distinct_communities(t) <= 1000);
  }
  const ExplorationCurve curve = exploration_curve(set, 1000, 2);
  FitRange range;
  range.min_value = 10;
  const PowerLawFit fit = fit_mu(curve, range);
  // small-scale run, generous band around 1/(1+gamma) = 0.4
  CHECK(fit.exponent > 0.3);
  CHECK(fit.exponent < 0.5);
}

TEST_CASE("epr poisson arrivals keep ordering and mean spacing") {
  EprParams params;
  params.poisson_arrivals = true;
  params.n_steps = 2000;
  params.inter_event_seconds = 600;
  const TrajectorySet set = build_trajectories(simulate_epr(params, 3));
  for (const Trajectory& t : set.trajectories) {
    double mean_gap = 0;
    for (std::size_t i = 1; i < t.visits.size(); ++i) {
      CHECK(t.visits[i].ts > t.visits[i - 1].ts);
      mean_gap += static_cast<double>(t.visits[i].ts - t.visits[i - 1].ts);
    }
    mean_gap /= static_cast<double>(t.visits.size() - 1);
    CHECK(mean_gap == doctest::Approx(600).epsilon(0.15));
  }
}

TEST_CASE("zipf generator hits the flat limit at zeta = 0") {
  const TrajectorySet set =
      build_trajectories(simulate_zipf_users(10, 0.0, 20000, 5, 3));
  const RankFrequencyCurve curve = zipf_curve(set, 10);
  for (double f : curve.f) CHECK(f == doctest::Approx(0.1).epsilon(0.08));
}

TEST_CASE("zipf generator guarantees exact coverage") {
  const TrajectorySet set = build_trajectories(simulate_zipf_users(7, 1.5, 7, 4, 9));
  for (const Trajectory& t : set.trajectories) {
    CHECK(t.visits.size() == 7);
    CHECK(distinct_communities(t) == 7);
  }
  const RankFrequencyCurve curve = zipf_curve(set, 7);
  for (double f : curve.f) CHECK(f > 0.0);

  CHECK_THROWS_AS(simulate_zipf_users(10, 1.0, 5, 1, 1), std::invalid_argument);
}

TEST_CASE("zipf generator matches the target law (chi-square)") {
  const std::uint32_t S = 50;
  const double zeta = 1.12;
  const std::uint32_t visits = 10050;  // 50 coverage + 1e4 draws
  const TrajectorySet set =
      build_trajectories(simulate_zipf_users(S, zeta, visits, 1, 12));
  REQUIRE(set.trajectories.size() == 1);

  std::map<Id, std::uint64_t> counts;
  for (const Visit& v : set.trajectories[0].visits) counts[v.community]++;
  std::vector<double> observed;
  for (const auto& [c, n] : counts) observed.push_back(static_cast<double>(n));
  std::sort(observed.rbegin(), observed.rend());

  double z = 0;
  for (std::uint32_t k = 1; k <= S; ++k) z += std::pow(k, -zeta);
  double chi2 = 0;
  for (std::uint32_t k = 1; k <= S; ++k) {
    const double expected = 1.0 + 10000.0 * std::pow(k, -zeta) / z;
    const double d = observed[k - 1] - expected;
    chi2 += d * d / expected;
  }
  // 49 degrees of freedom; the 0.999 quantile is ~85
  CHECK(chi2 < 85.0);
}

TEST_CASE("periodic returners concentrate mass at period multiples") {
  SUBCASE("no jitter, full attendance: single bin") {
    PeriodicParams params;
    params.n_users = 20;
    params.jitter_seconds = 0;
    params.attend_prob = 1.0;
    params.n_visits = 30;
    const ReturnHistogram hist =
        return_probability(build_trajectories(simulate_periodic_returners(params)), 100);
    CHECK(hist.mass(24) == doctest::Approx(1.0));
  }
  SUBCASE("skipping spreads mass over 24k bins only") {
    PeriodicParams params;
    params.n_users = 50;
    params.jitter_seconds = 0;
    params.attend_prob = 0.6;
    params.n_visits = 40;
    const ReturnHistogram hist =
        return_probability(build_trajectories(simulate_periodic_returners(params)), 240);
    for (std::uint32_t bin = 1; bin <= 240; ++bin)
      if (bin % 24 != 0) CHECK(hist.bin_counts[bin - 1] == 0);
    CHECK(hist.bin_counts[23] > 0);
    CHECK(hist.bin_counts[47] > 0);
  }
  SUBCASE("jitter below an hour keeps the daily bins as strict maxima") {
    PeriodicParams params;
    params.n_users = 200;
    params.jitter_seconds = 1800;
    params.attend_prob = 0.7;
    params.n_visits = 50;
    const ReturnHistogram hist =
        return_probability(build_trajectories(simulate_periodic_returners(params)), 96);
    for (std::uint32_t bin : {24u, 48u, 72u}) {
      CHECK(hist.bin_counts[bin - 1] > hist.bin_counts[bin - 2]);
      CHECK(hist.bin_counts[bin - 1] > hist.bin_counts[bin]);
    }
  }
  SUBCASE("two interleaved cohorts show both peak sets") {
    PeriodicParams daily;
    daily.n_users = 50;
    daily.n_visits = 40;
    daily.attend_prob = 1.0;
    PeriodicParams half;
    half.n_users = 50;
    half.n_visits = 40;
    half.attend_prob = 1.0;
    half.period_hours = 12;
    half.seed = 2;
    EventLog merged = simulate_periodic_returners(daily);
    append_events(merged, simulate_periodic_returners(half));
    const ReturnHistogram hist =
        return_probability(build_trajectories(std::move(merged)), 48);
    CHECK(hist.bin_counts[11] > 0);  // 12h
    CHECK(hist.bin_counts[23] > 0);  // 24h
  }
}

TEST_CASE("pattern cohorts have the prescribed stage trends") {
  const auto specs = default_cohort_specs(40, 11);
  const CohortData data = simulate_pattern_cohorts(specs, 1200);
  CHECK(data.labels.size() == 120);

  const TrajectorySet set = build_trajectories(EventLog(data.events));
  REQUIRE(set.trajectories.size() == 120);

  std::map<std::string, PatternLabel> truth(data.labels.begin(), data.labels.end());
  std::vector<double> conc_entropy_sum(20, 0.0);
  std::vector<double> e1_pnew_sum(19, 0.0), e2_pnew_sum(19, 0.0);
  int conc = 0, e1 = 0, e2 = 0;
  for (const Trajectory& t : set.trajectories) {
    const StageMetrics m = stage_metrics(t, 20);
    switch (truth.at(set.users.name(t.user))) {
      case PatternLabel::Concentrated:
        ++conc;
        for (int s = 0; s < 20; ++s) conc_entropy_sum[s] += m.entropy[s];
        break;
      case PatternLabel::ExploratoryI:
        ++e1;
        for (int s = 0; s < 19; ++s) e1_pnew_sum[s] += m.p_new[s];
        break;
      case PatternLabel::ExploratoryII:
        ++e2;
        for (int s = 0; s < 19; ++s) e2_pnew_sum[s] += m.p_new[s];
        break;
    }
  }
  CHECK(conc == 40);
  CHECK(e1 == 40);
  CHECK(e2 == 40);
  for (int s = 0; s < 20; ++s)
    CHECK(conc_entropy_sum[s] / conc < 0.5);  // concentrated stays low

  // rising vs falling exploration
  CHECK(e1_pnew_sum[16] / e1 > e1_pnew_sum[1] / e1);
  CHECK(e2_pnew_sum[16] / e2 < e2_pnew_sum[1] / e2);
}

TEST_CASE("pattern cohorts are deterministic and validated") {
  const auto specs = default_cohort_specs(5, 21);
  const CohortData a = simulate_pattern_cohorts(specs, 500);
  const CohortData b = simulate_pattern_cohorts(specs, 500);
  REQUIRE(a.events.events.size() == b.events.events.size());
  for (std::size_t i = 0; i < a.events.events.size(); ++i)
    CHECK(a.events.communities.name(a.events.events[i].community) ==
          b.events.communities.name(b.events.events[i].community));

  CHECK_THROWS_AS(simulate_pattern_cohorts(specs, 100), std::invalid_argument);
  auto bad = specs;
  bad[0].p_new_start = 1.5;
  CHECK_THROWS_AS(simulate_pattern_cohorts(bad, 500), std::invalid_argument);
}
