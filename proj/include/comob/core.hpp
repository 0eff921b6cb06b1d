// Core data model: interned ids, events, trajectories.
//
// User and community names are interned into dense uint32 ids so that a
// multi-million-event log fits in memory as a flat 16-byte-per-event array.
// The pools keep insertion order; anything serialized is sorted by name so
// output bytes do not depend on arrival order.
#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace comob {

using Id = std::uint32_t;

class StringPool {
 public:
  static constexpr Id npos = std::numeric_limits<Id>::max();

  Id intern(std::string_view s) {
    auto it = index_.find(s);
    if (it != index_.end()) return it->second;
    const Id id = static_cast<Id>(names_.size());
    names_.emplace_back(s);
    index_.emplace(std::string_view(names_.back()), id);
    return id;
  }

  // Lookup without inserting; npos if absent.
  Id find(std::string_view s) const {
    auto it = index_.find(s);
    return it == index_.end() ? npos : it->second;
  }

  const std::string& name(Id id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

 private:
  // deque keeps element addresses stable so the map may key on views.
  std::deque<std::string> names_;
  std::unordered_map<std::string_view, Id> index_;
};

struct Event {
  Id user;
  Id community;
  std::int64_t ts;  // seconds since Unix epoch, UTC
};

struct EventLog {
  StringPool users;
  StringPool communities;
  std::vector<Event> events;
};

struct Visit {
  Id community;
  std::int64_t ts;
};

struct Trajectory {
  Id user;
  std::vector<Visit> visits;  // sorted by ts, input order preserved on ties
};

// Trajectories are kept sorted by user name so iteration order is stable.
struct TrajectorySet {
  StringPool users;
  StringPool communities;
  std::vector<Trajectory> trajectories;
};

// Appends src's events to dst, re-interning names into dst's pools.
void append_events(EventLog& dst, const EventLog& src);

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace comob
