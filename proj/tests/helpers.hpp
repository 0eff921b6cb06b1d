// Shared helpers for building small fixtures in tests.
#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "comob/core.hpp"
#include "comob/ingest.hpp"

namespace testutil {

using EventTuple = std::tuple<std::string, std::string, std::int64_t>;

inline comob::EventLog make_log(const std::vector<EventTuple>& events) {
  comob::EventLog log;
  for (const auto& [user, community, ts] : events)
    log.events.push_back(
        {log.users.intern(user), log.communities.intern(community), ts});
  return log;
}

inline comob::TrajectorySet make_set(const std::vector<EventTuple>& events) {
  return comob::build_trajectories(make_log(events));
}

// The trajectory for `user`, assuming it exists.
inline const comob::Trajectory& traj_of(const comob::TrajectorySet& set,
                                        const std::string& user) {
  for (const comob::Trajectory& t : set.trajectories)
    if (set.users.name(t.user) == user) return t;
  throw std::runtime_error("no trajectory for " + user);
}

}  // namespace testutil
