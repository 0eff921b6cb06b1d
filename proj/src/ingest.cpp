#include "comob/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace comob {

using nlohmann::json;

namespace {

// Timestamps appear as integers, floats, and numeric strings in the wild.
bool extract_ts(const json& v, std::int64_t& out) {
  if (v.is_number_integer()) {
    out = v.get<std::int64_t>();
    return true;
  }
  if (v.is_number_float()) {
    out = static_cast<std::int64_t>(v.get<double>());
    return true;
  }
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = static_cast<std::int64_t>(d);
    return true;
  }
  return false;
}

enum class LineResult { ok, malformed, missing_field, out_of_range };

struct ParsedLine {
  std::string_view user;
  std::string_view community;
  std::int64_t ts;
};

LineResult parse_line(std::string_view line, const ParseOptions& opt, json& j,
                      ParsedLine& rec) {
  j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return LineResult::malformed;
  auto user_it = j.find(opt.fields.user);
  auto comm_it = j.find(opt.fields.community);
  auto ts_it = j.find(opt.fields.ts);
  if (user_it == j.end() || !user_it->is_string() || comm_it == j.end() ||
      !comm_it->is_string() || ts_it == j.end())
    return LineResult::missing_field;
  if (!extract_ts(*ts_it, rec.ts)) return LineResult::missing_field;
  if (rec.ts < opt.min_ts || rec.ts > opt.max_ts) return LineResult::out_of_range;
  rec.user = user_it->get_ref<const std::string&>();
  rec.community = comm_it->get_ref<const std::string&>();
  if (rec.user.empty() || rec.community.empty()) return LineResult::missing_field;
  return LineResult::ok;
}

struct Shard {
  EventLog log;
  ParseStats stats;
};

void parse_range(std::string_view text, std::size_t begin, std::size_t end,
                 const ParseOptions& opt, Shard& shard) {
  json j;
  std::size_t pos = begin;
  while (pos < end) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos || eol > end) eol = end;
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    shard.stats.lines++;
    ParsedLine rec;
    switch (parse_line(line, opt, j, rec)) {
      case LineResult::ok:
        shard.log.events.push_back({shard.log.users.intern(rec.user),
                                    shard.log.communities.intern(rec.community),
                                    rec.ts});
        shard.stats.parsed++;
        break;
      case LineResult::malformed:
        if (opt.strict)
          throw std::runtime_error("parse_events: malformed JSON at line " +
                                   std::to_string(shard.stats.lines));
        shard.stats.malformed++;
        break;
      case LineResult::missing_field:
        if (opt.strict)
          throw std::runtime_error("parse_events: missing or bad field at line " +
                                   std::to_string(shard.stats.lines));
        shard.stats.missing_field++;
        break;
      case LineResult::out_of_range:
        if (opt.strict)
          throw std::runtime_error("parse_events: timestamp out of range at line " +
                                   std::to_string(shard.stats.lines));
        shard.stats.out_of_range++;
        break;
    }
  }
}

}  // namespace

ParseStats parse_events(std::string_view text, const ParseOptions& opt,
                        EventLog& out, int threads) {
  if (threads < 1) threads = 1;
  if (opt.strict) threads = 1;
  if (text.empty()) return {};

  // Contiguous line-aligned shards; concatenating them in order reproduces
  // the single-threaded result exactly.
  std::vector<std::size_t> bounds{0};
  for (int t = 1; t < threads; ++t) {
    std::size_t guess = text.size() * static_cast<std::size_t>(t) / threads;
    std::size_t eol = text.find('\n', guess);
    bounds.push_back(eol == std::string_view::npos ? text.size() : eol + 1);
  }
  bounds.push_back(text.size());
  std::sort(bounds.begin(), bounds.end());

  std::vector<Shard> shards(bounds.size() - 1);
  if (shards.size() == 1) {
    // Direct call so strict-mode exceptions propagate normally.
    parse_range(text, bounds[0], bounds[1], opt, shards[0]);
  } else {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int s = 0; s < static_cast<int>(shards.size()); ++s)
      parse_range(text, bounds[s], bounds[s + 1], opt, shards[s]);
  }

  ParseStats total;
  for (Shard& shard : shards) {
    total.lines += shard.stats.lines;
    total.parsed += shard.stats.parsed;
    total.malformed += shard.stats.malformed;
    total.missing_field += shard.stats.missing_field;
    total.out_of_range += shard.stats.out_of_range;
    append_events(out, shard.log);
  }
  return total;
}

ParseStats parse_events(std::istream& in, const ParseOptions& opt, EventLog& out,
                        int threads) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return parse_events(std::string_view(text), opt, out, threads);
}

std::uint64_t filter_deleted(EventLog& log, std::string_view token) {
  const Id deleted = log.users.find(token);
  if (deleted == StringPool::npos) return 0;
  const auto before = log.events.size();
  std::erase_if(log.events, [deleted](const Event& e) { return e.user == deleted; });
  return before - log.events.size();
}

std::vector<std::pair<Id, std::uint64_t>> high_frequency_candidates(
    const EventLog& log, std::uint64_t threshold, int threads) {
  require(threshold >= 1, "high_frequency_candidates: threshold must be >= 1");
  const std::size_t n_users = log.users.size();
  std::vector<std::uint64_t> counts(n_users, 0);
#pragma omp parallel num_threads(threads) if (threads > 1)
  {
    std::vector<std::uint64_t> local(n_users, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(log.events.size()); ++i)
      local[log.events[i].user]++;
#pragma omp critical
    for (std::size_t u = 0; u < n_users; ++u) counts[u] += local[u];
  }

  std::vector<std::pair<Id, std::uint64_t>> flagged;
  for (std::size_t u = 0; u < n_users; ++u)
    if (counts[u] >= threshold) flagged.emplace_back(static_cast<Id>(u), counts[u]);
  std::sort(flagged.begin(), flagged.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return log.users.name(a.first) < log.users.name(b.first);
  });
  return flagged;
}

namespace {

bool contains_term(const std::string& id, const TermFilter& filter) {
  if (!filter.case_insensitive) {
    for (const std::string& term : filter.id_terms)
      if (id.find(term) != std::string::npos) return true;
    return false;
  }
  std::string lower(id);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const std::string& term : filter.id_terms) {
    std::string t(term);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower.find(t) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

NonhumanRemoval filter_nonhuman(EventLog& log, const TermFilter& filter) {
  require(!filter.id_terms.empty(), "filter_nonhuman: id_terms must be non-empty");
  const std::size_t n_users = log.users.size();
  std::vector<char> matched(n_users, 0);
  for (std::size_t u = 0; u < n_users; ++u)
    matched[u] = contains_term(log.users.name(static_cast<Id>(u)), filter) ? 1 : 0;

  std::vector<char> seen(n_users, 0);
  NonhumanRemoval result;
  const auto before = log.events.size();
  std::erase_if(log.events, [&](const Event& e) {
    if (!matched[e.user]) return false;
    if (!seen[e.user]) {
      seen[e.user] = 1;
      result.removed_accounts++;
    }
    return true;
  });
  result.removed_events = before - log.events.size();
  return result;
}

void slice_by_time(EventLog& log, std::int64_t start_ts, std::int64_t end_ts) {
  require(start_ts < end_ts, "slice_by_time: start_ts must be < end_ts");
  std::erase_if(log.events,
                [=](const Event& e) { return e.ts < start_ts || e.ts >= end_ts; });
}

TrajectorySet build_trajectories(EventLog&& log, int threads) {
  const std::size_t n_users = log.users.size();
  std::vector<std::uint64_t> counts(n_users, 0);
  for (const Event& e : log.events) counts[e.user]++;

  std::vector<std::uint64_t> offsets(n_users + 1, 0);
  std::partial_sum(counts.begin(), counts.end(), offsets.begin() + 1);

  // Bucket visits per user preserving input order, then sort each bucket.
  std::vector<Visit> visits(log.events.size());
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Event& e : log.events)
    visits[cursor[e.user]++] = {e.community, e.ts};

  std::vector<Id> order;
  order.reserve(n_users);
  for (std::size_t u = 0; u < n_users; ++u)
    if (counts[u] > 0) order.push_back(static_cast<Id>(u));
  std::sort(order.begin(), order.end(), [&](Id a, Id b) {
    return log.users.name(a) < log.users.name(b);
  });

  TrajectorySet set;
  set.trajectories.resize(order.size());
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(order.size()); ++i) {
    const Id u = order[i];
    Trajectory& traj = set.trajectories[i];
    traj.user = u;
    traj.visits.assign(visits.begin() + offsets[u], visits.begin() + offsets[u + 1]);
    std::stable_sort(traj.visits.begin(), traj.visits.end(),
                     [](const Visit& a, const Visit& b) { return a.ts < b.ts; });
  }
  set.users = std::move(log.users);
  set.communities = std::move(log.communities);
  log.events.clear();
  return set;
}

}  // namespace comob
