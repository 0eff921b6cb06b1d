#include <map>
#include <random>
#include <sstream>

#include "comob/ingest.hpp"
#include "comob/io_util.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace comob;

TEST_CASE("parse_events maps fields and preserves order") {
  const std::string text =
      "{\"author\":\"a\",\"subreddit\":\"nyc\",\"created_utc\":1451606400}\n"
      "{\"author\":\"b\",\"subreddit\":\"boston\",\"created_utc\":\"1451606401\"}\n"
      "{\"author\":\"c\",\"subreddit\":\"la\",\"created_utc\":1451606402.0}\n";
  EventLog log;
  const ParseStats stats = parse_events(text, {}, log);
  CHECK(stats.parsed == 3);
  CHECK(stats.errors() == 0);
  REQUIRE(log.events.size() == 3);
  CHECK(log.users.name(log.events[0].user) == "a");
  CHECK(log.communities.name(log.events[0].community) == "nyc");
  CHECK(log.events[0].ts == 1451606400);
  CHECK(log.events[1].ts == 1451606401);  // numeric string accepted
  CHECK(log.events[2].ts == 1451606402);  // float truncated
}

TEST_CASE("parse_events on an empty stream") {
  EventLog log;
  const ParseStats stats = parse_events(std::string_view{}, {}, log);
  CHECK(stats.lines == 0);
  CHECK(stats.errors() == 0);
  CHECK(log.events.empty());
}

TEST_CASE("parse_events lenient vs strict error handling") {
  const std::string text =
      "{\"author\":\"a\"}\n"
      "not json at all\n"
      "{\"author\":\"ok\",\"subreddit\":\"x\",\"created_utc\":5}\n";
  SUBCASE("lenient counts and skips") {
    EventLog log;
    const ParseStats stats = parse_events(text, {}, log);
    CHECK(stats.missing_field == 1);
    CHECK(stats.malformed == 1);
    CHECK(stats.parsed == 1);
    CHECK(log.events.size() == 1);
  }
  SUBCASE("strict throws on the first bad line") {
    EventLog log;
    ParseOptions opt;
    opt.strict = true;
    CHECK_THROWS_AS(parse_events(text, opt, log), std::runtime_error);
  }
}

TEST_CASE("parse_events custom mapping and ts bounds") {
  const std::string text =
      "{\"who\":\"a\",\"where\":\"x\",\"when\":100}\n"
      "{\"who\":\"a\",\"where\":\"x\",\"when\":99}\n";
  ParseOptions opt;
  opt.fields = {"who", "where", "when"};
  opt.min_ts = 100;
  EventLog log;
  const ParseStats stats = parse_events(text, opt, log);
  CHECK(stats.parsed == 1);
  CHECK(stats.out_of_range == 1);
}

TEST_CASE("parse_events is shard-count independent") {
  std::ostringstream text;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 997; ++i) {
    if (rng() % 17 == 0)
      text << "garbage line\n";
    else
      text << "{\"author\":\"u" << rng() % 50 << "\",\"subreddit\":\"c"
           << rng() % 20 << "\",\"created_utc\":" << 1000 + i << "}\n";
  }
  const std::string t = text.str();
  EventLog one, four;
  const ParseStats s1 = parse_events(t, {}, one, 1);
  const ParseStats s4 = parse_events(t, {}, four, 4);
  CHECK(s1.parsed == s4.parsed);
  CHECK(s1.malformed == s4.malformed);
  REQUIRE(one.events.size() == four.events.size());
  for (std::size_t i = 0; i < one.events.size(); ++i) {
    CHECK(one.users.name(one.events[i].user) == four.users.name(four.events[i].user));
    CHECK(one.events[i].ts == four.events[i].ts);
  }
}

TEST_CASE("filter_deleted removes the sentinel user only") {
  EventLog log = testutil::make_log(
      {{"[deleted]", "x", 1}, {"a", "x", 2}, {"[deleted]", "y", 3}});
  CHECK(filter_deleted(log) == 2);
  REQUIRE(log.events.size() == 1);
  CHECK(log.users.name(log.events[0].user) == "a");
  // idempotent
  CHECK(filter_deleted(log) == 0);
  CHECK(log.events.size() == 1);
}

TEST_CASE("high_frequency_candidates threshold boundary") {
  std::vector<testutil::EventTuple> events;
  for (int i = 0; i < 60; ++i) events.push_back({"busy", "x", i});
  for (int i = 0; i < 49; ++i) events.push_back({"quiet", "x", i});
  EventLog log = testutil::make_log(events);
  const auto flagged = high_frequency_candidates(log, 50);
  REQUIRE(flagged.size() == 1);
  CHECK(log.users.name(flagged[0].first) == "busy");
  CHECK(flagged[0].second == 60);
  CHECK(high_frequency_candidates(log, 61).empty());
  EventLog empty;
  CHECK(high_frequency_candidates(empty, 50).empty());
}

TEST_CASE("filter_nonhuman substring semantics") {
  EventLog log = testutil::make_log({{"image_transcriber", "x", 1},
                                     {"image_transcriber", "y", 2},
                                     {"robotics_fan", "x", 3},
                                     {"weather-bot", "x", 4},
                                     {"AutoModerator", "x", 5},
                                     {"human", "x", 6}});
  const NonhumanRemoval removed = filter_nonhuman(log, {});
  CHECK(removed.removed_events == 4);
  CHECK(removed.removed_accounts == 3);
  REQUIRE(log.events.size() == 2);
  // "-bot" with the hyphen does not match "robotics_fan"
  CHECK(log.users.name(log.events[0].user) == "robotics_fan");
  CHECK(log.users.name(log.events[1].user) == "human");

  // applying again removes nothing
  const NonhumanRemoval again = filter_nonhuman(log, {});
  CHECK(again.removed_events == 0);
}

TEST_CASE("filter_nonhuman case sensitivity modes") {
  EventLog log = testutil::make_log({{"moderator_team", "x", 1}, {"plain", "x", 2}});
  SUBCASE("default is case-sensitive") {
    const NonhumanRemoval removed = filter_nonhuman(log, {});
    CHECK(removed.removed_events == 0);
  }
  SUBCASE("case-insensitive flag matches") {
    TermFilter filter;
    filter.case_insensitive = true;
    const NonhumanRemoval removed = filter_nonhuman(log, filter);
    CHECK(removed.removed_events == 1);
  }
  SUBCASE("empty terms are rejected") {
    TermFilter filter;
    filter.id_terms.clear();
    CHECK_THROWS_AS(filter_nonhuman(log, filter), std::invalid_argument);
  }
}

TEST_CASE("slice_by_time boundaries") {
  EventLog log = testutil::make_log({{"a", "x", 10}, {"a", "x", 15}, {"a", "x", 20}});
  slice_by_time(log, 10, 20);
  REQUIRE(log.events.size() == 2);  // start inclusive, end exclusive
  CHECK(log.events[0].ts == 10);
  CHECK(log.events[1].ts == 15);
  CHECK_THROWS_AS(slice_by_time(log, 20, 10), std::invalid_argument);
}

TEST_CASE("build_trajectories sorts by ts with stable ties") {
  TrajectorySet set = testutil::make_set(
      {{"a", "x", 2}, {"a", "y", 1}, {"a", "z", 1}, {"b", "w", 5}});
  REQUIRE(set.trajectories.size() == 2);
  const Trajectory& a = testutil::traj_of(set, "a");
  REQUIRE(a.visits.size() == 3);
  CHECK(set.communities.name(a.visits[0].community) == "y");  // ts 1, first in input
  CHECK(set.communities.name(a.visits[1].community) == "z");  // ts 1, second in input
  CHECK(set.communities.name(a.visits[2].community) == "x");
  CHECK(testutil::traj_of(set, "b").visits.size() == 1);
}

TEST_CASE("build_trajectories conserves every event") {
  // counting oracle: per-user totals from an independent pass
  std::mt19937_64 rng(42);
  EventLog log;
  std::map<std::string, std::uint64_t> oracle;
  for (int i = 0; i < 1'000'000; ++i) {
    const std::string user = "u" + std::to_string(rng() % 1000);
    const std::string comm = "c" + std::to_string(rng() % 200);
    oracle[user]++;
    log.events.push_back({log.users.intern(user), log.communities.intern(comm),
                          static_cast<std::int64_t>(rng() % 100000)});
  }
  const TrajectorySet set = build_trajectories(std::move(log), 2);
  std::uint64_t total = 0;
  for (const Trajectory& t : set.trajectories) {
    CHECK(t.visits.size() == oracle.at(set.users.name(t.user)));
    total += t.visits.size();
    for (std::size_t i = 1; i < t.visits.size(); ++i)
      CHECK(t.visits[i - 1].ts <= t.visits[i].ts);
  }
  CHECK(total == 1'000'000);
}

TEST_CASE("event conservation across the cleaning pipeline") {
  EventLog log = testutil::make_log({{"[deleted]", "x", 1},
                                     {"nice-bot", "x", 2},
                                     {"a", "x", 3},
                                     {"b", "y", 4}});
  const std::uint64_t total = log.events.size();
  const std::uint64_t deleted = filter_deleted(log);
  const NonhumanRemoval nonhuman = filter_nonhuman(log, {});
  CHECK(total == log.events.size() + deleted + nonhuman.removed_events);
}

TEST_CASE("trajectory ndjson round trip") {
  const TrajectorySet set = testutil::make_set(
      {{"a", "x", 2}, {"a", "y", 1}, {"b", "x", 3}, {"b", "x", 3}});
  std::ostringstream out;
  write_trajectories_ndjson(out, set);
  std::istringstream in(out.str());
  const TrajectorySet back = read_trajectories_ndjson(in);
  std::ostringstream out2;
  write_trajectories_ndjson(out2, back);
  CHECK(out.str() == out2.str());
}
