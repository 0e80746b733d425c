#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cosmo/eventlog/event_log.hpp"

namespace cosmo::eventlog {

// XES 1.0. Only concept:name and time:timestamp are mandatory per event.
// Throws ParseError (malformed XML, with line) or SchemaError (missing
// attribute, naming trace and event index, both 0-based).
EventLog parse_xes(const std::filesystem::path& path);
EventLog parse_xes(std::istream& in, const std::string& source_name);

struct CsvMapping {
    std::string case_col = "case:concept:name";
    std::string activity_col = "concept:name";
    std::string timestamp_col = "time:timestamp";
    std::string timestamp_format = "iso8601";
    char separator = ',';
};

// Rows are grouped by case (first-appearance order), sorted by timestamp
// within a case. Errors report 1-based data row numbers (header excluded).
EventLog parse_csv(const std::filesystem::path& path, const CsvMapping& mapping);
EventLog parse_csv(std::istream& in, const CsvMapping& mapping, const std::string& source_name);

// Canonical line-delimited JSON: one trace per line,
// {"case_id":...,"events":[{"activity":...,"timestamp_ms":...}]}.
std::string to_jsonl(const EventLog& log);
void write_jsonl(const EventLog& log, const std::filesystem::path& path);
EventLog parse_jsonl(std::istream& in, const std::string& source_name);
EventLog read_jsonl(const std::filesystem::path& path);

// Dispatches on extension (.xes, .csv, .jsonl/.ndjson/.json).
EventLog read_log(const std::filesystem::path& path, const CsvMapping& mapping = {});

} // namespace cosmo::eventlog
