#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cosmo/eventlog/event_log.hpp"

namespace cosmo::artifacts {

inline const std::string kStart = "__start__";
inline const std::string kEnd = "__end__";

struct DirectlyFollowsGraph {
    std::size_t n_traces = 0;
    std::map<std::string, double> coverage;  // fraction of traces containing the activity
    std::map<std::pair<std::string, std::string>, std::size_t> edges;  // includes start/end pseudo-nodes
};

// Throws DataError on an empty trace set.
DirectlyFollowsGraph build_dfg(std::span<const std::vector<std::string>> traces);
DirectlyFollowsGraph build_dfg(const eventlog::EventLog& log);

struct CoverageRow {
    std::string activity;
    double original = 0.0;
    double simulated = 0.0;
    double delta = 0.0;  // simulated - original
};

// Union of activities, sorted; a missing activity has coverage 0.
std::vector<CoverageRow> coverage_delta(const DirectlyFollowsGraph& original, const DirectlyFollowsGraph& simulated);

// Drops edges with count < threshold * (largest edge count). Nodes and edges
// are emitted in sorted order.
std::string export_dot(const DirectlyFollowsGraph& g, double threshold = 0.0);

// {"n_traces", "nodes": [{"activity","coverage"}], "edges": [{"from","to","count"}]}
nlohmann::json to_json(const DirectlyFollowsGraph& g, double threshold = 0.0);
nlohmann::json to_json(std::span<const CoverageRow> rows);

} // namespace cosmo::artifacts
