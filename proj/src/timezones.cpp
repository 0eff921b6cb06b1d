#include "comob/timezones.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace comob {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// civil-calendar algorithms).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int yr = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = yr + (m <= 2);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

// 1970-01-01 was a Thursday.
unsigned weekday_from_days(std::int64_t days) {
  return static_cast<unsigned>(((days % 7) + 11) % 7);
}

// Day-of-month of the n-th given weekday (n is 1-based).
unsigned nth_weekday(int year, unsigned month, unsigned weekday, unsigned n) {
  const unsigned first_wd = weekday_from_days(days_from_civil(year, month, 1));
  return 1 + (weekday + 7 - first_wd) % 7 + (n - 1) * 7;
}

unsigned last_weekday(int year, unsigned month, unsigned weekday) {
  static const unsigned days_in[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  unsigned last = days_in[month - 1];
  if (month == 2 && (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)))
    last = 29;
  const unsigned last_wd = weekday_from_days(days_from_civil(year, month, last));
  return last - (last_wd + 7 - weekday) % 7;
}

constexpr unsigned kSunday = 0;

// US rule: 2007+ DST runs from the second Sunday of March, 02:00 local
// standard time, to the first Sunday of November, 02:00 local daylight
// time. 1987-2006: first Sunday of April to last Sunday of October.
bool us_dst_active(std::int64_t utc_ts, int std_offset) {
  const std::int64_t local_std = utc_ts + std_offset;
  const CivilTime ct = civil_from_unix(local_std);
  std::int64_t start, end;
  if (ct.year >= 2007) {
    start = unix_from_civil(ct.year, 3, nth_weekday(ct.year, 3, kSunday, 2), 2);
    end = unix_from_civil(ct.year, 11, nth_weekday(ct.year, 11, kSunday, 1), 2) - 3600;
  } else {
    start = unix_from_civil(ct.year, 4, nth_weekday(ct.year, 4, kSunday, 1), 2);
    end = unix_from_civil(ct.year, 10, last_weekday(ct.year, 10, kSunday), 2) - 3600;
  }
  return local_std >= start && local_std < end;
}

// EU rule: all zones switch at 01:00 UTC on the last Sundays of March and
// October.
bool eu_dst_active(std::int64_t utc_ts) {
  const CivilTime ct = civil_from_unix(utc_ts);
  const std::int64_t start =
      unix_from_civil(ct.year, 3, last_weekday(ct.year, 3, kSunday), 1);
  const std::int64_t end =
      unix_from_civil(ct.year, 10, last_weekday(ct.year, 10, kSunday), 1);
  return utc_ts >= start && utc_ts < end;
}

struct NamedZone {
  const char* name;
  int std_offset_hours;
  int dst_offset_hours;  // equal to std when the zone has no DST
  char rule;             // 'f' fixed, 'u' US, 'e' EU
};

const NamedZone kZones[] = {
    {"UTC", 0, 0, 'f'},
    {"America/New_York", -5, -4, 'u'},
    {"America/Detroit", -5, -4, 'u'},
    {"America/Chicago", -6, -5, 'u'},
    {"America/Denver", -7, -6, 'u'},
    {"America/Phoenix", -7, -7, 'f'},
    {"America/Los_Angeles", -8, -7, 'u'},
    {"America/Anchorage", -9, -8, 'u'},
    {"Pacific/Honolulu", -10, -10, 'f'},
    {"Europe/London", 0, 1, 'e'},
    {"Europe/Dublin", 0, 1, 'e'},
    {"Europe/Paris", 1, 2, 'e'},
    {"Europe/Berlin", 1, 2, 'e'},
    {"Europe/Madrid", 1, 2, 'e'},
    {"Europe/Rome", 1, 2, 'e'},
    {"Europe/Amsterdam", 1, 2, 'e'},
    {"Asia/Tokyo", 9, 9, 'f'},
    {"Asia/Seoul", 9, 9, 'f'},
    {"Asia/Shanghai", 8, 8, 'f'},
    {"Asia/Singapore", 8, 8, 'f'},
    {"Asia/Kolkata", 5 * 60 + 30, 5 * 60 + 30, 'f'},  // stored in minutes below
};

bool parse_fixed_offset(const std::string& spec, int& seconds) {
  std::string s = spec;
  if (s.rfind("UTC", 0) == 0) s = s.substr(3);
  if (s.empty()) {
    seconds = 0;
    return spec.rfind("UTC", 0) == 0;
  }
  if (s[0] != '+' && s[0] != '-') return false;
  const int sign = s[0] == '-' ? -1 : 1;
  s = s.substr(1);
  unsigned h = 0, m = 0;
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
    h = h * 10 + (s[i++] - '0');
  if (i == 0) return false;
  if (i < s.size()) {
    if (s[i] == ':') ++i;
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
      m = m * 10 + (s[j++] - '0');
    if (j != s.size() || j == i) return false;
  }
  if (m >= 60) return false;
  seconds = sign * static_cast<int>(h * 3600 + m * 60);
  return true;
}

}  // namespace

CivilTime civil_from_unix(std::int64_t t) {
  const std::int64_t days = floor_div(t, 86400);
  std::int64_t rem = t - days * 86400;
  CivilTime ct{};
  civil_from_days(days, ct.year, ct.month, ct.day);
  ct.hour = static_cast<unsigned>(rem / 3600);
  rem %= 3600;
  ct.minute = static_cast<unsigned>(rem / 60);
  ct.second = static_cast<unsigned>(rem % 60);
  ct.weekday = weekday_from_days(days);
  return ct;
}

std::int64_t unix_from_civil(int year, unsigned month, unsigned day,
                             unsigned hour, unsigned minute, unsigned second) {
  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 +
         second;
}

TimeZoneRule TimeZoneRule::parse(const std::string& spec) {
  for (const NamedZone& z : kZones) {
    if (spec == z.name) {
      // Kolkata's entry carries minutes; everything else is whole hours.
      const int scale = (spec == "Asia/Kolkata") ? 60 : 3600;
      const Kind kind = z.rule == 'u'   ? Kind::us_dst
                        : z.rule == 'e' ? Kind::eu_dst
                                        : Kind::fixed;
      return TimeZoneRule(kind, z.std_offset_hours * scale,
                          z.dst_offset_hours * scale, spec);
    }
  }
  int seconds = 0;
  if (parse_fixed_offset(spec, seconds)) {
    if (seconds < -12 * 3600 || seconds > 14 * 3600)
      throw std::invalid_argument("timezone offset out of range: " + spec);
    return TimeZoneRule(Kind::fixed, seconds, seconds, spec);
  }
  throw std::invalid_argument(
      "unknown timezone '" + spec +
      "' (use UTC, a fixed offset like +05:30, or a supported named zone)");
}

int TimeZoneRule::offset_seconds(std::int64_t utc_ts) const {
  switch (kind_) {
    case Kind::fixed:
      return std_offset_;
    case Kind::us_dst:
      return us_dst_active(utc_ts, std_offset_) ? dst_offset_ : std_offset_;
    case Kind::eu_dst:
      return eu_dst_active(utc_ts) ? dst_offset_ : std_offset_;
  }
  return std_offset_;
}

TimezoneMap TimezoneMap::load(std::istream& in) {
  TimezoneMap map;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw std::runtime_error("tz map: expected community<TAB>zone at line " +
                               std::to_string(lineno));
    map.set(line.substr(0, tab), TimeZoneRule::parse(line.substr(tab + 1)));
  }
  return map;
}

TimezoneMap TimezoneMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tz map: " + path);
  return load(in);
}

void TimezoneMap::set(const std::string& community, TimeZoneRule rule) {
  entries_.insert_or_assign(community, std::move(rule));
}

const TimeZoneRule* TimezoneMap::find(const std::string& community) const {
  auto it = entries_.find(community);
  return it == entries_.end() ? nullptr : &it->second;
}

}  // namespace comob
