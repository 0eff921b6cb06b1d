#include <cmath>

#include "comob/randomwalk.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace comob;

namespace {

// One visit per hour for `hours` hours; community picked by `pick(h)`.
template <typename Pick>
TrajectorySet hourly_user(int hours, Pick pick) {
  std::vector<testutil::EventTuple> events;
  for (int h = 0; h < hours; ++h)
    events.push_back({"u", pick(h), 1000000 + 3600LL * h});
  return testutil::make_set(events);
}

}  // namespace

TEST_CASE("exploration curve limits") {
  SUBCASE("one community forever: S(t) = 1") {
    const TrajectorySet set = hourly_user(48, [](int) { return "x"; });
    const ExplorationCurve curve = exploration_curve(set, 48);
    CHECK(curve.n_users == 1);
    for (double s : curve.s_of_t) CHECK(s == 1.0);
  }
  SUBCASE("a new community every hour: S(t) = t") {
    const TrajectorySet set =
        hourly_user(48, [](int h) { return "c" + std::to_string(h); });
    const ExplorationCurve curve = exploration_curve(set, 48);
    for (std::size_t i = 0; i < curve.s_of_t.size(); ++i)
      CHECK(curve.s_of_t[i] == static_cast<double>(i + 1));
  }
  SUBCASE("nobody spans the horizon") {
    const TrajectorySet set = hourly_user(5, [](int) { return "x"; });
    CHECK_THROWS_AS(exploration_curve(set, 100), std::invalid_argument);
  }
}

TEST_CASE("short-span users are excluded from the average") {
  std::vector<testutil::EventTuple> events;
  for (int h = 0; h < 10; ++h)
    events.push_back({"long", "c" + std::to_string(h), 3600LL * h});
  events.push_back({"short", "x", 0});
  const TrajectorySet set = testutil::make_set(events);
  const ExplorationCurve curve = exploration_curve(set, 10);
  CHECK(curve.n_users == 1);
  CHECK(curve.s_of_t[9] == 10.0);
}

TEST_CASE("per-user s(t) is non-decreasing and bounded by visits") {
  const TrajectorySet set = hourly_user(100, [](int h) {
    return "c" + std::to_string((h * 7) % 13);
  });
  const ExplorationCurve curve = exploration_curve(set, 100);
  for (std::size_t i = 1; i < curve.s_of_t.size(); ++i) {
    CHECK(curve.s_of_t[i] >= curve.s_of_t[i - 1]);
    CHECK(curve.s_of_t[i] <= static_cast<double>(i + 1));
  }
}

TEST_CASE("fit_mu on exact laws") {
  ExplorationCurve curve;
  curve.n_users = 1;
  SUBCASE("S(t) = t^0.4") {
    for (int t = 1; t <= 500; ++t)
      curve.s_of_t.push_back(std::pow(static_cast<double>(t), 0.4));
    const PowerLawFit fit = fit_mu(curve);
    CHECK(fit.exponent == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant S gives mu = 0") {
    curve.s_of_t.assign(100, 3.0);
    CHECK(fit_mu(curve).exponent == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("zipf_curve on hand-built users") {
  SUBCASE("uniform over 4 communities") {
    const TrajectorySet set = hourly_user(80, [](int h) {
      return "c" + std::to_string(h % 4);
    });
    const RankFrequencyCurve curve = zipf_curve(set, 4);
    CHECK(curve.n_users == 1);
    for (double f : curve.f) CHECK(f == doctest::Approx(0.25));
  }
  SUBCASE("counts 6,3,1 normalize to 0.6,0.3,0.1") {
    std::vector<testutil::EventTuple> events;
    for (int i = 0; i < 6; ++i) events.push_back({"u", "heavy", 100 + i});
    for (int i = 0; i < 3; ++i) events.push_back({"u", "mid", 200 + i});
    events.push_back({"u", "rare", 300});
    const RankFrequencyCurve curve = zipf_curve(testutil::make_set(events), 3);
    CHECK(curve.f[0] == doctest::Approx(0.6));
    CHECK(curve.f[1] == doctest::Approx(0.3));
    CHECK(curve.f[2] == doctest::Approx(0.1));
  }
  SUBCASE("only exact-S users qualify") {
    std::vector<testutil::EventTuple> events;
    for (int h = 0; h < 8; ++h)
      events.push_back({"four", "c" + std::to_string(h % 4), 3600LL * h});
    for (int h = 0; h < 8; ++h)
      events.push_back({"two", "d" + std::to_string(h % 2), 3600LL * h});
    const RankFrequencyCurve curve = zipf_curve(testutil::make_set(events), 4);
    CHECK(curve.n_users == 1);
    CHECK_THROWS_AS(zipf_curve(testutil::make_set(events), 7), std::invalid_argument);
  }
}

TEST_CASE("rank-frequency curve is normalized and non-increasing") {
  const TrajectorySet set = hourly_user(500, [](int h) {
    // first pass covers 10 communities, the rest skew toward a few
    const int c = h < 10 ? h : h % 4;
    return "c" + std::to_string(c);
  });
  std::uint32_t distinct = 10;
  const RankFrequencyCurve curve = zipf_curve(set, distinct);
  double sum = 0;
  for (std::size_t k = 0; k < curve.f.size(); ++k) {
    sum += curve.f[k];
    if (k > 0) CHECK(curve.f[k] <= curve.f[k - 1]);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_zeta on exact laws") {
  RankFrequencyCurve curve;
  curve.s_value = 50;
  curve.n_users = 1;
  SUBCASE("f_k = k^-1.2 normalized") {
    double z = 0;
    for (int k = 1; k <= 50; ++k) z += std::pow(k, -1.2);
    for (int k = 1; k <= 50; ++k) curve.f.push_back(std::pow(k, -1.2) / z);
    const PowerLawFit fit = fit_zeta(curve);
    CHECK(fit.exponent == doctest::Approx(1.2).epsilon(1e-9));
  }
  SUBCASE("flat curve gives zeta = 0") {
    curve.f.assign(50, 0.02);
    CHECK(fit_zeta(curve).exponent == doctest::Approx(0.0).epsilon(1e-12));
  }
}
