#include "cosmo/declare/conformance.hpp"

#include "cosmo/error.hpp"

namespace cosmo::declare {

ConformanceReport conformance_report(const ConstraintUniverse& u, std::span<const std::vector<std::string>> traces,
                                     std::span<const ConstraintVector> imposed, std::span<const std::size_t> mask) {
    if (traces.empty()) throw DataError("conformance check needs at least one trace");
    if (imposed.size() != 1 && imposed.size() != traces.size())
        throw ValidationError("conformance check needs one imposed vector or one per trace");
    for (auto k : mask)
        if (k >= u.size()) throw ValidationError("mask coordinate " + std::to_string(k) + " outside the universe");
    for (const auto& v : imposed)
        if (v.size() != u.size()) throw ValidationError("imposed vector does not match the universe");

    ConformanceReport r;
    r.n_traces = traces.size();
    std::vector<std::size_t> constraint_hits(mask.size(), 0);
    std::map<Group, std::size_t> group_hits;
    for (auto k : mask) group_hits.emplace(group(u[k].tmpl), 0);

    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& phi = imposed.size() == 1 ? imposed[0] : imposed[i];
        auto enc = u.encode(traces[i]);
        TraceConformance tc;
        std::map<Group, bool> group_ok;
        for (auto& [g, _] : group_hits) group_ok[g] = true;
        for (std::size_t j = 0; j < mask.size(); ++j) {
            auto k = mask[j];
            bool ok = evaluate(u, k, enc) == (phi.bits[k] == 1);
            if (ok)
                ++constraint_hits[j];
            else {
                tc.violated.push_back(k);
                group_ok[group(u[k].tmpl)] = false;
            }
        }
        tc.satisfied = tc.violated.empty();
        r.n_satisfied += tc.satisfied;
        for (auto& [g, ok] : group_ok) group_hits[g] += ok;
        r.per_trace.push_back(std::move(tc));
    }
    const auto n = static_cast<double>(traces.size());
    r.overall_rate = static_cast<double>(r.n_satisfied) / n;
    for (auto& [g, hits] : group_hits) r.per_group[g] = static_cast<double>(hits) / n;
    for (std::size_t j = 0; j < mask.size(); ++j) {
        auto k = mask[j];
        // With per-trace vectors the imposed bit on masked coordinates is
        // shared; report the first trace's value.
        r.per_constraint.push_back(
            {k, u[k].display(), imposed[0].bits[k], static_cast<double>(constraint_hits[j]) / n});
    }
    return r;
}

ConformanceReport conformance_report(const ConstraintUniverse& u, std::span<const std::vector<std::string>> traces,
                                     const ConstraintVector& imposed, std::span<const std::size_t> mask) {
    return conformance_report(u, traces, std::span<const ConstraintVector>(&imposed, 1), mask);
}

nlohmann::json to_json(const ConformanceReport& r) {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [g, rate] : r.per_group) groups[std::string(name(g))] = rate;
    auto constraints = nlohmann::json::array();
    for (const auto& c : r.per_constraint)
        constraints.push_back(
            {{"coordinate", c.coordinate}, {"constraint", c.constraint}, {"imposed", c.imposed}, {"rate", c.rate}});
    auto traces = nlohmann::json::array();
    for (const auto& t : r.per_trace) traces.push_back({{"satisfied", t.satisfied}, {"violated", t.violated}});
    return {{"overall_rate", r.overall_rate},
            {"n_traces", r.n_traces},
            {"n_satisfied", r.n_satisfied},
            {"per_group", std::move(groups)},
            {"per_constraint", std::move(constraints)},
            {"per_trace", std::move(traces)}};
}

} // namespace cosmo::declare
