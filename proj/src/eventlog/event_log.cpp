#include "cosmo/eventlog/event_log.hpp"

#include <algorithm>
#include <set>

#include "cosmo/hash.hpp"

namespace cosmo::eventlog {

std::vector<std::string> Trace::activities() const {
    std::vector<std::string> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(e.activity);
    return out;
}

std::string Provenance::fingerprint() const {
    std::string text = source + '\n' + format;
    for (const auto& s : steps) text += '\n' + s;
    return cosmo::fingerprint(text);
}

std::size_t EventLog::event_count() const noexcept {
    std::size_t n = 0;
    for (const auto& t : traces) n += t.events.size();
    return n;
}

const Trace* EventLog::find(const std::string& case_id) const {
    for (const auto& t : traces)
        if (t.case_id == case_id) return &t;
    return nullptr;
}

void refresh_activity_set(EventLog& log) {
    std::set<std::string> acts;
    for (const auto& t : log.traces)
        for (const auto& e : t.events) acts.insert(e.activity);
    log.activity_set.assign(acts.begin(), acts.end());
}

void sort_events(EventLog& log) {
    for (auto& t : log.traces)
        std::stable_sort(t.events.begin(), t.events.end(),
                         [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

EventLog make_log(std::vector<Trace> traces, std::string source, std::string format) {
    EventLog log;
    log.traces = std::move(traces);
    log.provenance.source = std::move(source);
    log.provenance.format = std::move(format);
    sort_events(log);
    refresh_activity_set(log);
    return log;
}

} // namespace cosmo::eventlog
