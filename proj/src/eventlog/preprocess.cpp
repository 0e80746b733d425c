#include "cosmo/eventlog/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cosmo/error.hpp"

namespace cosmo::eventlog {

std::size_t length_quantile(std::vector<std::size_t> lengths, double q) {
    if (lengths.empty()) throw DataError("length quantile of an empty log");
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("max_len_percentile must be in (0, 1]");
    std::sort(lengths.begin(), lengths.end());
    auto n = lengths.size();
    // The epsilon absorbs representation error in q (0.9 * 30 = 27.000000000000004).
    auto index = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
    return lengths[std::min(index, n - 1)];
}

EventLog clean(const EventLog& log, const CleanOptions& options) {
    if (log.empty()) throw DataError("cannot clean an empty log");
    std::vector<std::size_t> lengths;
    lengths.reserve(log.traces.size());
    for (const auto& t : log.traces) lengths.push_back(t.size());
    auto cap = length_quantile(lengths, options.max_len_percentile);

    EventLog out;
    out.provenance = log.provenance;
    for (const auto& t : log.traces)
        if (t.size() >= options.min_len && t.size() <= cap) out.traces.push_back(t);
    if (out.traces.empty())
        throw DataError("all traces filtered: no trace has length in [" + std::to_string(options.min_len) + ", " +
                        std::to_string(cap) + "]");
    refresh_activity_set(out);
    std::ostringstream step;
    step << "clean(min_len=" << options.min_len << ",q=" << options.max_len_percentile
         << ",quantile=nearest-rank-ceil,P=" << cap << ",kept=" << out.traces.size() << "/" << log.traces.size()
         << ")";
    out.provenance.steps.push_back(step.str());
    out.provenance.length_cap = cap;
    return out;
}

EventLog derive_times(EventLog log) {
    for (auto& t : log.traces) {
        if (t.events.empty()) continue;
        const auto last = t.events.back().timestamp;
        for (std::size_t j = 0; j < t.events.size(); ++j) {
            auto& e = t.events[j];
            e.execution_time = j == 0 ? 0.0 : static_cast<double>(e.timestamp - t.events[j - 1].timestamp) / 1000.0;
            e.remaining_time = static_cast<double>(last - e.timestamp) / 1000.0;
        }
    }
    return log;
}

} // namespace cosmo::eventlog
