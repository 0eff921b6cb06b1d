#include <algorithm>
#include <cmath>
#include <random>

#include "comob/randomness.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace comob;

namespace {

Trajectory traj_with_counts(const std::vector<int>& counts) {
  Trajectory traj;
  traj.user = 0;
  std::int64_t ts = 0;
  for (std::size_t c = 0; c < counts.size(); ++c)
    for (int i = 0; i < counts[c]; ++i)
      traj.visits.push_back({static_cast<Id>(c), ts++});
  return traj;
}

}  // namespace

TEST_CASE("visit_distribution computes exact relative frequencies") {
  const Trajectory traj = traj_with_counts({2, 1, 1});  // x,x,y,z
  const VisitDistribution dist = visit_distribution(traj);
  CHECK(dist.n == 3);
  CHECK(dist.total_visits == 4);
  CHECK(dist.probs[0].second == 0.5);
  CHECK(dist.probs[1].second == 0.25);
  CHECK(dist.probs[2].second == 0.25);

  const VisitDistribution single = visit_distribution(traj_with_counts({1}));
  CHECK(single.probs[0].second == 1.0);

  CHECK_THROWS_AS(visit_distribution(Trajectory{}), std::invalid_argument);
}

TEST_CASE("visit_distribution matches a counting oracle on a long trajectory") {
  std::mt19937_64 rng(77);
  std::vector<int> counts(40, 0);
  Trajectory traj;
  for (int i = 0; i < 100'000; ++i) {
    const int c = static_cast<int>(rng() % 40);
    counts[c]++;
    traj.visits.push_back({static_cast<Id>(c), i});
  }
  const VisitDistribution dist = visit_distribution(traj);
  for (const auto& [id, p] : dist.probs)
    CHECK(p == static_cast<double>(counts[id]) / 100'000.0);  // exact division
}

TEST_CASE("entropy reference values") {
  CHECK(entropy_bits(visit_distribution(traj_with_counts({7}))) == 0.0);

  const Trajectory uniform16 = traj_with_counts(std::vector<int>(16, 3));
  CHECK(entropy_bits(visit_distribution(uniform16)) ==
        doctest::Approx(4.0).epsilon(1e-9));

  const Trajectory half = traj_with_counts({2, 1, 1});
  CHECK(entropy_bits(visit_distribution(half)) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("max_frq reference values") {
  CHECK(max_frq(visit_distribution(traj_with_counts({5}))) == 1.0);
  CHECK(max_frq(visit_distribution(traj_with_counts({1, 1, 1, 1}))) == 0.25);
  CHECK(max_frq(visit_distribution(traj_with_counts({6, 3, 1}))) == 0.6);
}

TEST_CASE("entropy and max_frq bounds on random distributions") {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 500; ++round) {
    const int n = 1 + static_cast<int>(rng() % 30);
    std::vector<int> counts(n);
    for (int& c : counts) c = 1 + static_cast<int>(rng() % 50);
    const VisitDistribution dist = visit_distribution(traj_with_counts(counts));
    const double h = entropy_bits(dist);
    const double m = max_frq(dist);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(dist.n)) + 1e-12);
    CHECK(m >= 1.0 / static_cast<double>(dist.n) - 1e-12);
    CHECK(-std::log2(m) <= h + 1e-12);  // min-entropy below Shannon entropy
    if (m == 1.0) CHECK(h == 0.0);
  }
}

TEST_CASE("metrics are invariant to visit order and duplication") {
  std::mt19937_64 rng(21);
  std::vector<int> counts{4, 9, 1, 6};
  const Trajectory base = traj_with_counts(counts);
  const VisitDistribution d0 = visit_distribution(base);

  Trajectory shuffled = base;
  std::shuffle(shuffled.visits.begin(), shuffled.visits.end(), rng);
  const VisitDistribution d1 = visit_distribution(shuffled);
  CHECK(entropy_bits(d0) == entropy_bits(d1));
  CHECK(max_frq(d0) == max_frq(d1));

  std::vector<int> doubled;
  for (int c : counts) doubled.push_back(2 * c);
  const VisitDistribution d2 = visit_distribution(traj_with_counts(doubled));
  CHECK(entropy_bits(d0) == doctest::Approx(entropy_bits(d2)).epsilon(1e-12));
  CHECK(max_frq(d0) == max_frq(d2));
}

namespace {

TrajectorySet set_with_user(const std::string& user, int distinct, int visits) {
  std::vector<testutil::EventTuple> events;
  for (int i = 0; i < visits; ++i)
    events.push_back({user, "c" + std::to_string(i % distinct), i});
  return testutil::make_set(events);
}

}  // namespace

TEST_CASE("active_filter strict thresholds") {
  TrajectorySet keep = set_with_user("u", 3, 1001);
  active_filter(keep);
  CHECK(keep.trajectories.size() == 1);

  TrajectorySet drop_n = set_with_user("u", 2, 5000);
  active_filter(drop_n);
  CHECK(drop_n.trajectories.empty());

  TrajectorySet drop_v = set_with_user("u", 10, 1000);
  active_filter(drop_v);
  CHECK(drop_v.trajectories.empty());
}

TEST_CASE("randomness_distribution thresholds and shape") {
  std::vector<UserRandomness> users(2);
  users[0].entropy = 0.0;
  users[0].max_frq = 1.0;
  users[1].entropy = 4.0;
  users[1].max_frq = 0.2;
  const RandomnessDistribution dist = randomness_distribution(users);
  CHECK(dist.frac_entropy_gt_4 == 0.0);  // strictly greater
  CHECK(dist.frac_entropy_lt_1 == 0.5);
  CHECK(dist.frac_max_frq_gt_08 == 0.5);
  CHECK(dist.frac_max_frq_gt_09 == 0.5);
  CHECK(dist.frac_max_frq_lt_03 == 0.5);
  CHECK(dist.entropy_ccdf.points.front().second == 1.0);

  std::vector<UserRandomness> same(5);
  for (auto& u : same) {
    u.entropy = 2.0;
    u.max_frq = 0.5;
  }
  const RandomnessDistribution point = randomness_distribution(same);
  CHECK(point.entropy_ccdf.points.size() == 1);  // point mass

  CHECK_THROWS_AS(randomness_distribution({}), std::invalid_argument);
}

TEST_CASE("user_randomness agrees with the per-user functions") {
  std::mt19937_64 rng(4);
  std::vector<testutil::EventTuple> events;
  for (int i = 0; i < 5000; ++i)
    events.push_back({"u" + std::to_string(rng() % 20),
                      "c" + std::to_string(rng() % 15),
                      static_cast<std::int64_t>(i)});
  const TrajectorySet set = testutil::make_set(events);
  const auto batch = user_randomness(set);
  REQUIRE(batch.size() == set.trajectories.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const VisitDistribution dist = visit_distribution(set.trajectories[i]);
    CHECK(batch[i].entropy == entropy_bits(dist));
    CHECK(batch[i].max_frq == max_frq(dist));
    CHECK(batch[i].n == dist.n);
  }
}
