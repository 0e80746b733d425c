#include "cosmo/artifacts/dfg.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "cosmo/error.hpp"

namespace cosmo::artifacts {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

std::size_t max_count(const DirectlyFollowsGraph& g) {
    std::size_t m = 0;
    for (const auto& [e, n] : g.edges) m = std::max(m, n);
    return m;
}

bool kept(std::size_t count, std::size_t max, double threshold) {
    return static_cast<double>(count) >= threshold * static_cast<double>(max);
}

} // namespace

DirectlyFollowsGraph build_dfg(std::span<const std::vector<std::string>> traces) {
    if (traces.empty()) throw DataError("cannot build a directly-follows graph from an empty trace set");
    DirectlyFollowsGraph g;
    g.n_traces = traces.size();
    std::map<std::string, std::size_t> containing;
    for (const auto& t : traces) {
        std::set<std::string> seen(t.begin(), t.end());
        for (const auto& a : seen) ++containing[a];
        const std::string* prev = &kStart;
        for (const auto& a : t) {
            ++g.edges[{*prev, a}];
            prev = &a;
        }
        ++g.edges[{*prev, kEnd}];
    }
    for (const auto& [a, n] : containing) g.coverage[a] = static_cast<double>(n) / static_cast<double>(g.n_traces);
    return g;
}

DirectlyFollowsGraph build_dfg(const eventlog::EventLog& log) {
    std::vector<std::vector<std::string>> traces;
    for (const auto& t : log.traces) traces.push_back(t.activities());
    return build_dfg(traces);
}

std::vector<CoverageRow> coverage_delta(const DirectlyFollowsGraph& original, const DirectlyFollowsGraph& simulated) {
    std::set<std::string> names;
    for (const auto& [a, c] : original.coverage) names.insert(a);
    for (const auto& [a, c] : simulated.coverage) names.insert(a);
    std::vector<CoverageRow> rows;
    for (const auto& a : names) {
        auto o = original.coverage.count(a) ? original.coverage.at(a) : 0.0;
        auto s = simulated.coverage.count(a) ? simulated.coverage.at(a) : 0.0;
        rows.push_back({a, o, s, s - o});
    }
    return rows;
}

std::string export_dot(const DirectlyFollowsGraph& g, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("edge threshold must lie in [0, 1]");
    const auto max = max_count(g);
    std::string out = "digraph dfg {\n  rankdir=LR;\n";
    out += "  " + quote(kStart) + " [shape=circle, label=\"start\"];\n";
    out += "  " + quote(kEnd) + " [shape=doublecircle, label=\"end\"];\n";
    char buf[32];
    for (const auto& [a, c] : g.coverage) {
        std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * c);
        out += "  " + quote(a) + " [shape=box, label=" + quote(a + "\n" + buf) + "];\n";
    }
    for (const auto& [e, n] : g.edges)
        if (kept(n, max, threshold))
            out += "  " + quote(e.first) + " -> " + quote(e.second) + " [label=\"" + std::to_string(n) + "\"];\n";
    return out + "}\n";
}

nlohmann::json to_json(const DirectlyFollowsGraph& g, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("edge threshold must lie in [0, 1]");
    const auto max = max_count(g);
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& [a, c] : g.coverage) nodes.push_back({{"activity", a}, {"coverage", c}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [e, n] : g.edges)
        if (kept(n, max, threshold)) edges.push_back({{"from", e.first}, {"to", e.second}, {"count", n}});
    return {{"n_traces", g.n_traces}, {"nodes", nodes}, {"edges", edges}};
}

nlohmann::json to_json(std::span<const CoverageRow> rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"activity", r.activity}, {"original", r.original}, {"simulated", r.simulated}, {"delta", r.delta}});
    return out;
}

} // namespace cosmo::artifacts
