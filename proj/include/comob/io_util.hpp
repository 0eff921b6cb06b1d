// File formats and small I/O helpers. Wire formats:
//   events:       one JSON object per line, fields per FieldMapping
//   trajectories: {"user":...,"visits":[[community,ts],...]} per line
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "comob/core.hpp"
#include "comob/ingest.hpp"

namespace comob {

void write_events_ndjson(std::ostream& out, const EventLog& log,
                         const FieldMapping& fields = {});

void write_trajectories_ndjson(std::ostream& out, const TrajectorySet& set);
TrajectorySet read_trajectories_ndjson(std::istream& in);

std::string cleaning_report_json(const CleaningReport& report);

std::string slurp_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over the file's bytes, as a fixed-width hex string.
std::string file_digest_hex(const std::string& path);

// Round-trip-safe decimal formatting for CSV cells.
std::string fmt_double(double v);

}  // namespace comob
