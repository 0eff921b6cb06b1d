// Community-to-timezone mapping with fixed offsets and a built-in table of
// named zones (US and EU daylight-saving rules). The standard library's
// timezone database support is not available on this toolchain, so the
// civil-calendar conversions are implemented here.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace comob {

struct CivilTime {
  int year;
  unsigned month;   // 1..12
  unsigned day;     // 1..31
  unsigned hour;    // 0..23
  unsigned minute;  // 0..59
  unsigned second;  // 0..59
  unsigned weekday; // 0 = Sunday .. 6 = Saturday
};

// `t` is seconds since the epoch with any zone offset already applied.
CivilTime civil_from_unix(std::int64_t t);
std::int64_t unix_from_civil(int year, unsigned month, unsigned day,
                             unsigned hour = 0, unsigned minute = 0,
                             unsigned second = 0);

class TimeZoneRule {
 public:
  // Accepts "UTC", fixed offsets ("+05:30", "-08:00", "UTC+2"), or a named
  // zone from the built-in table (e.g. America/New_York, Europe/Paris).
  // Throws on anything else; offsets must lie in [-12h, +14h].
  static TimeZoneRule parse(const std::string& spec);

  int offset_seconds(std::int64_t utc_ts) const;
  const std::string& name() const { return name_; }

 private:
  enum class Kind { fixed, us_dst, eu_dst };
  TimeZoneRule(Kind kind, int std_offset, int dst_offset, std::string name)
      : kind_(kind), std_offset_(std_offset), dst_offset_(dst_offset),
        name_(std::move(name)) {}

  Kind kind_;
  int std_offset_;
  int dst_offset_;
  std::string name_;
};

// community_id <TAB> zone_spec, one per line; '#' starts a comment.
class TimezoneMap {
 public:
  static TimezoneMap load(std::istream& in);
  static TimezoneMap load_file(const std::string& path);

  void set(const std::string& community, TimeZoneRule rule);
  const TimeZoneRule* find(const std::string& community) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, TimeZoneRule> entries_;
};

}  // namespace comob
