#include "comob/io_util.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace comob {

using nlohmann::json;

void write_events_ndjson(std::ostream& out, const EventLog& log,
                         const FieldMapping& fields) {
  for (const Event& e : log.events) {
    json j;
    j[fields.user] = log.users.name(e.user);
    j[fields.community] = log.communities.name(e.community);
    j[fields.ts] = e.ts;
    out << j.dump() << '\n';
  }
}

void write_trajectories_ndjson(std::ostream& out, const TrajectorySet& set) {
  for (const Trajectory& traj : set.trajectories) {
    json visits = json::array();
    for (const Visit& v : traj.visits)
      visits.push_back(json::array({set.communities.name(v.community), v.ts}));
    json j;
    j["user"] = set.users.name(traj.user);
    j["visits"] = std::move(visits);
    out << j.dump() << '\n';
  }
}

TrajectorySet read_trajectories_ndjson(std::istream& in) {
  TrajectorySet set;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("user") ||
        !j.contains("visits") || !j["visits"].is_array())
      throw std::runtime_error("trajectories: malformed record at line " +
                               std::to_string(lineno));
    Trajectory traj;
    traj.user = set.users.intern(j["user"].get_ref<const std::string&>());
    traj.visits.reserve(j["visits"].size());
    for (const json& v : j["visits"]) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_string() ||
          !v[1].is_number_integer())
        throw std::runtime_error("trajectories: malformed visit at line " +
                                 std::to_string(lineno));
      traj.visits.push_back({set.communities.intern(v[0].get_ref<const std::string&>()),
                             v[1].get<std::int64_t>()});
    }
    if (traj.visits.empty())
      throw std::runtime_error("trajectories: empty visit list at line " +
                               std::to_string(lineno));
    if (!std::is_sorted(traj.visits.begin(), traj.visits.end(),
                        [](const Visit& a, const Visit& b) { return a.ts < b.ts; }))
      throw std::runtime_error("trajectories: visits not time-ordered at line " +
                               std::to_string(lineno));
    set.trajectories.push_back(std::move(traj));
  }
  return set;
}

std::string cleaning_report_json(const CleaningReport& report) {
  json j;
  j["total_events"] = report.total_events;
  j["removed_deleted"] = report.removed_deleted;
  j["removed_nonhuman"] = report.removed_nonhuman;
  j["removed_accounts"] = report.removed_accounts;
  json flagged = json::array();
  for (const auto& [user, count] : report.flagged_candidates)
    flagged.push_back(json::array({user, count}));
  j["flagged_candidates"] = std::move(flagged);
  j["parse"] = {{"lines", report.parse.lines},
                {"parsed", report.parse.parsed},
                {"malformed", report.parse.malformed},
                {"missing_field", report.parse.missing_field},
                {"out_of_range", report.parse.out_of_range}};
  return j.dump(2) + "\n";
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string file_digest_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

}  // namespace comob
