// Temporal structure of visit histories: the distribution of return times
// to a community, and hourly posting profiles split by weekday/weekend in
// community-local time.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "comob/core.hpp"
#include "comob/timezones.hpp"

namespace comob {

struct ReturnHistogram {
  // bin_counts[i] holds gaps g with i*3600 < g <= (i+1)*3600 (and g == 0
  // lands in the first bin). Probability mass is count / n_gaps.
  std::vector<std::uint64_t> bin_counts;
  std::uint64_t n_gaps = 0;  // all gaps, including those past the last bin
  std::uint64_t binned = 0;

  double mass(std::size_t hour_bin) const {  // hour_bin is 1-based
    return n_gaps == 0 ? 0.0
                       : static_cast<double>(bin_counts[hour_bin - 1]) /
                             static_cast<double>(n_gaps);
  }
};

// Gap between consecutive visits by the same user to the same community,
// pooled over all users. Throws when there are no gaps at all.
ReturnHistogram return_probability(const TrajectorySet& set,
                                   std::uint32_t max_hours = 720,
                                   int threads = 1);

struct HourlyProfile {
  std::array<double, 24> weekday{};
  std::array<double, 24> weekend{};
  std::array<std::uint64_t, 24> weekday_counts{};
  std::array<std::uint64_t, 24> weekend_counts{};
};

// Share of posts per local hour, normalized separately per day type.
// Every whitelisted community must resolve in the timezone map; the error
// message names the first one that does not.
HourlyProfile hourly_profile(const EventLog& log, const TimezoneMap& tz_map,
                             const std::vector<std::string>& community_whitelist);

namespace serial {
// Reference gap binning over a single trajectory set, hash-map based.
ReturnHistogram return_gaps(const TrajectorySet& set, std::uint32_t max_hours);
}  // namespace serial

}  // namespace comob
