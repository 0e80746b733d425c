#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cosmo/timestamp.hpp"

namespace cosmo::eventlog {

using AttributeValue = std::variant<std::string, double>;

struct Event {
    std::string activity;
    TimestampMs timestamp = 0;
    // Carried opaquely; not consumed by the model.
    std::vector<std::pair<std::string, AttributeValue>> attributes{};
    // Seconds; filled in by derive_times().
    double execution_time = 0.0;
    double remaining_time = 0.0;
};

struct Trace {
    std::string case_id;
    std::vector<Event> events;

    std::size_t size() const noexcept { return events.size(); }
    std::vector<std::string> activities() const;
};

struct Provenance {
    std::string source;
    std::string format;
    // Ordered list of preprocessing steps, e.g. "clean(min_len=3,q=0.9,P=12)".
    std::vector<std::string> steps;
    // Cleaning cap P when clean() was applied.
    std::optional<std::size_t> length_cap;

    // Stable hash of source, format and steps.
    std::string fingerprint() const;
};

struct EventLog {
    std::vector<Trace> traces;
    std::vector<std::string> activity_set;
    Provenance provenance;

    bool empty() const noexcept { return traces.empty(); }
    std::size_t event_count() const noexcept;
    const Trace* find(const std::string& case_id) const;
};

// Recomputes activity_set as the sorted union of activities in the traces.
void refresh_activity_set(EventLog& log);

// Stable-sorts events of every trace by timestamp (file order breaks ties).
void sort_events(EventLog& log);

// Builds a log from traces, sorting events and computing the activity set.
EventLog make_log(std::vector<Trace> traces, std::string source = "memory", std::string format = "memory");

} // namespace cosmo::eventlog
