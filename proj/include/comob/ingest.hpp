// Event-log ingestion: line-oriented JSON parsing, cleaning rules, and
// per-user trajectory extraction.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "comob/core.hpp"

namespace comob {

// Names of the three required fields in each input record.
struct FieldMapping {
  std::string user = "author";
  std::string community = "subreddit";
  std::string ts = "created_utc";
};

struct ParseOptions {
  FieldMapping fields;
  // Lenient mode (default) counts bad lines and moves on; strict mode
  // throws on the first one. Strict parsing always runs single-threaded
  // so the reported line number is the first offending line in the file.
  bool strict = false;
  std::int64_t min_ts = std::numeric_limits<std::int64_t>::min();
  std::int64_t max_ts = std::numeric_limits<std::int64_t>::max();
};

struct ParseStats {
  std::uint64_t lines = 0;
  std::uint64_t parsed = 0;
  std::uint64_t malformed = 0;      // not valid JSON
  std::uint64_t missing_field = 0;  // valid JSON lacking a usable mapped field
  std::uint64_t out_of_range = 0;   // ts outside [min_ts, max_ts]

  std::uint64_t errors() const { return malformed + missing_field + out_of_range; }
};

// Appends one Event per well-formed line to `out`, preserving input order.
// Parallel parsing shards the input into contiguous line ranges, so the
// result is identical for any thread count.
ParseStats parse_events(std::string_view text, const ParseOptions& opt,
                        EventLog& out, int threads = 1);
ParseStats parse_events(std::istream& in, const ParseOptions& opt,
                        EventLog& out, int threads = 1);

// Drops every event whose user id equals `token`. Returns events removed.
std::uint64_t filter_deleted(EventLog& log, std::string_view token = "[deleted]");

// Users with at least `threshold` posts, ordered by count descending
// (ties by user name). Advisory output for human review, never an
// automatic filter.
std::vector<std::pair<Id, std::uint64_t>> high_frequency_candidates(
    const EventLog& log, std::uint64_t threshold = 50000, int threads = 1);

struct TermFilter {
  std::vector<std::string> id_terms{"-bot", "_transcriber", "Moderator"};
  bool case_insensitive = false;  // exact-substring, case-sensitive by default
};

struct NonhumanRemoval {
  std::uint64_t removed_events = 0;
  std::uint64_t removed_accounts = 0;
};

// Removes all events whose user id contains any filter term as a substring.
NonhumanRemoval filter_nonhuman(EventLog& log, const TermFilter& filter);

// Keeps events with start_ts <= ts < end_ts. Throws on inverted bounds.
void slice_by_time(EventLog& log, std::int64_t start_ts, std::int64_t end_ts);

// Buckets events per user and sorts each user's visits by timestamp
// (stable, so equal timestamps keep input order). Trajectories come out
// sorted by user name. Consumes the log to reuse its string pools.
TrajectorySet build_trajectories(EventLog&& log, int threads = 1);

struct CleaningReport {
  std::uint64_t total_events = 0;  // events parsed before any filtering
  std::uint64_t removed_deleted = 0;
  std::uint64_t removed_nonhuman = 0;
  std::uint64_t removed_accounts = 0;
  std::vector<std::pair<std::string, std::uint64_t>> flagged_candidates;
  ParseStats parse;
};

}  // namespace comob
