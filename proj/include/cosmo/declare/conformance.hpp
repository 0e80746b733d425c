#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosmo/declare/universe.hpp"

namespace cosmo::declare {

struct TraceConformance {
    bool satisfied = false;
    std::vector<std::size_t> violated;  // masked coordinates whose value differs from the imposed bit
};

struct ConstraintRate {
    std::size_t coordinate = 0;
    std::string constraint;
    int imposed = 0;
    double rate = 0.0;
};

struct ConformanceReport {
    std::size_t n_traces = 0;
    std::size_t n_satisfied = 0;
    double overall_rate = 0.0;
    // Fraction of traces meeting every masked coordinate of the group; only
    // groups with at least one masked coordinate appear.
    std::map<Group, double> per_group;
    std::vector<ConstraintRate> per_constraint;
    std::vector<TraceConformance> per_trace;
};

// A trace satisfies iff evaluate(instance_k, trace) equals imposed bit k for
// every masked k (a 0 bit means the constraint must be violated).
// Throws DataError on an empty trace set.
ConformanceReport conformance_report(const ConstraintUniverse& u, std::span<const std::vector<std::string>> traces,
                                     const ConstraintVector& imposed, std::span<const std::size_t> mask);

// Per-trace imposed vectors (same mask for all).
ConformanceReport conformance_report(const ConstraintUniverse& u, std::span<const std::vector<std::string>> traces,
                                     std::span<const ConstraintVector> imposed, std::span<const std::size_t> mask);

// {overall_rate, per_group: {...}, per_constraint: [...], per_trace: [...]}
nlohmann::json to_json(const ConformanceReport& r);

} // namespace cosmo::declare
