#include <cmath>

#include "cosmo/eventlog/io.hpp"
#include "cosmo/simulator/simulate.hpp"

namespace cosmo::simulator {

std::vector<std::vector<std::string>> activity_sequences(const SimulationReport& r) {
    std::vector<std::vector<std::string>> out;
    out.reserve(r.traces.size());
    for (const auto& t : r.traces) out.push_back(t.generated.activities);
    return out;
}

nlohmann::json to_json(const declare::ConstraintUniverse& u, const SimulationReport& r) {
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& b : r.bases) {
        auto j = to_json(u, b.phi_s);
        j["case_id"] = b.case_id;
        bases.push_back(std::move(j));
    }
    nlohmann::json masked = nlohmann::json::array();
    for (auto k : r.mask) masked.push_back(u[k].display());
    nlohmann::json traces = nlohmann::json::array();
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < r.traces.size(); ++i) {
        const auto& g = r.traces[i].generated;
        truncated += g.truncated;
        traces.push_back({{"index", i},
                          {"base", r.traces[i].base},
                          {"activities", g.activities},
                          {"execution_times", g.execution_times},
                          {"remaining_times", g.remaining_times},
                          {"truncated", g.truncated}});
    }
    nlohmann::json out = {{"universe_fingerprint", r.universe_fingerprint},
                          {"config", r.config},
                          {"imposed", {{"mask", r.mask}, {"constraints", masked}, {"bases", bases}}},
                          {"conformance", declare::to_json(r.conformance)},
                          {"n_traces", r.traces.size()},
                          {"n_truncated", truncated},
                          {"traces", traces}};
    if (!r.prefix_satisfaction.empty()) out["prefix_satisfaction"] = r.prefix_satisfaction;
    return out;
}

std::string to_jsonl(const SimulationReport& r) {
    eventlog::EventLog log;
    for (std::size_t i = 0; i < r.traces.size(); ++i) {
        const auto& g = r.traces[i].generated;
        eventlog::Trace t{"sim-" + std::to_string(i), {}};
        double clock = 0.0;
        for (std::size_t k = 0; k < g.activities.size(); ++k) {
            clock += g.execution_times[k];
            t.events.push_back({g.activities[k], static_cast<TimestampMs>(std::llround(clock * 1000.0))});
        }
        log.traces.push_back(std::move(t));
    }
    return eventlog::to_jsonl(log);
}

} // namespace cosmo::simulator
