#include "comob/temporal.hpp"

#include <stdexcept>
#include <unordered_map>

namespace comob {

namespace {

// 1-based hour bin, left-open right-closed; zero gaps go to bin 1.
inline std::uint64_t gap_bin(std::int64_t gap) {
  if (gap <= 0) return 1;
  return static_cast<std::uint64_t>((gap + 3599) / 3600);
}

}  // namespace

namespace serial {

ReturnHistogram return_gaps(const TrajectorySet& set, std::uint32_t max_hours) {
  ReturnHistogram hist;
  hist.bin_counts.assign(max_hours, 0);
  for (const Trajectory& traj : set.trajectories) {
    std::unordered_map<Id, std::int64_t> last_visit;
    for (const Visit& v : traj.visits) {
      auto [it, inserted] = last_visit.try_emplace(v.community, v.ts);
      if (!inserted) {
        const std::uint64_t bin = gap_bin(v.ts - it->second);
        it->second = v.ts;
        hist.n_gaps++;
        if (bin <= max_hours) {
          hist.bin_counts[bin - 1]++;
          hist.binned++;
        }
      }
    }
  }
  return hist;
}

}  // namespace serial

namespace {

ReturnHistogram return_gaps_parallel(const TrajectorySet& set,
                                     std::uint32_t max_hours, int threads) {
  ReturnHistogram hist;
  hist.bin_counts.assign(max_hours, 0);
#pragma omp parallel num_threads(threads)
  {
    std::vector<std::uint64_t> local(max_hours, 0);
    std::uint64_t local_gaps = 0, local_binned = 0;
    std::vector<std::int64_t> last_ts(set.communities.size(), 0);
    std::vector<std::uint32_t> stamp(set.communities.size(), 0);
    std::uint32_t epoch = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(set.trajectories.size());
         ++i) {
      ++epoch;
      for (const Visit& v : set.trajectories[i].visits) {
        if (stamp[v.community] == epoch) {
          const std::uint64_t bin = gap_bin(v.ts - last_ts[v.community]);
          ++local_gaps;
          if (bin <= max_hours) {
            local[bin - 1]++;
            ++local_binned;
          }
        } else {
          stamp[v.community] = epoch;
        }
        last_ts[v.community] = v.ts;
      }
    }
#pragma omp critical
    {
      for (std::uint32_t b = 0; b < max_hours; ++b) hist.bin_counts[b] += local[b];
      hist.n_gaps += local_gaps;
      hist.binned += local_binned;
    }
  }
  return hist;
}

}  // namespace

ReturnHistogram return_probability(const TrajectorySet& set, std::uint32_t max_hours,
                                   int threads) {
  require(max_hours >= 1, "return_probability: max_hours must be >= 1");
  ReturnHistogram hist = threads > 1 ? return_gaps_parallel(set, max_hours, threads)
                                     : serial::return_gaps(set, max_hours);
  if (hist.n_gaps == 0)
    throw std::invalid_argument(
        "return_probability: no repeat visits, nothing to bin");
  return hist;
}

HourlyProfile hourly_profile(const EventLog& log, const TimezoneMap& tz_map,
                             const std::vector<std::string>& community_whitelist) {
  require(!community_whitelist.empty(), "hourly_profile: empty whitelist");

  // Resolve the whitelist up front so a missing zone fails before any work.
  std::unordered_map<Id, const TimeZoneRule*> rules;
  for (const std::string& name : community_whitelist) {
    const TimeZoneRule* rule = tz_map.find(name);
    if (rule == nullptr)
      throw std::invalid_argument("hourly_profile: community '" + name +
                                  "' missing from timezone map");
    const Id id = log.communities.find(name);
    if (id != StringPool::npos) rules.emplace(id, rule);
  }

  HourlyProfile profile;
  for (const Event& e : log.events) {
    auto it = rules.find(e.community);
    if (it == rules.end()) continue;
    const CivilTime local = civil_from_unix(e.ts + it->second->offset_seconds(e.ts));
    const bool weekend = local.weekday == 0 || local.weekday == 6;
    if (weekend)
      profile.weekend_counts[local.hour]++;
    else
      profile.weekday_counts[local.hour]++;
  }

  std::uint64_t wd_total = 0, we_total = 0;
  for (int h = 0; h < 24; ++h) {
    wd_total += profile.weekday_counts[h];
    we_total += profile.weekend_counts[h];
  }
  for (int h = 0; h < 24; ++h) {
    profile.weekday[h] = wd_total ? static_cast<double>(profile.weekday_counts[h]) /
                                        static_cast<double>(wd_total)
                                  : 0.0;
    profile.weekend[h] = we_total ? static_cast<double>(profile.weekend_counts[h]) /
                                        static_cast<double>(we_total)
                                  : 0.0;
  }
  return profile;
}

}  // namespace comob
