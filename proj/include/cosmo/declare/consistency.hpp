#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosmo/declare/universe.hpp"

namespace cosmo::declare {

struct Violation {
    std::string rule;
    std::vector<std::size_t> coordinates;
    std::string message;
};

nlohmann::json to_json(const Violation& v);

// Tri-state per coordinate: -1 unassigned, 0, 1.
using Assignment = std::vector<std::int8_t>;

Assignment to_assignment(const ConstraintVector& v);

// Logical contradictions among the values of a full vector (e.g.
// Existence(a)=1 with Absence(a)=1). Vectors computed from real traces are
// never flagged. Empty result means consistent.
std::vector<Violation> check_consistency(const ConstraintUniverse& u, const ConstraintVector& v);

// Same logical rules over a partial assignment, plus checks that apply to the
// `demanded` coordinates only: a Positive Relation demanded alongside its
// Negative Relation counterpart on the same pair (ChainResponse vs
// NotChainSuccession, Response vs NotSuccession), and joint
// unsatisfiability of the demanded literals over finite traces (decided by
// automata product; reported with a minimal conflicting subset).
std::vector<Violation> check_consistency(const ConstraintUniverse& u, std::span<const std::int8_t> assignment,
                                         std::span<const std::size_t> demanded);

struct Literal {
    std::size_t coordinate;
    bool value;
};

enum class Satisfiability { Satisfiable, Unsatisfiable, Unknown };

struct SatResult {
    Satisfiability status = Satisfiability::Unknown;
    // Shortest non-empty trace over the universe's activities satisfying
    // every literal, when one exists.
    std::vector<std::string> witness;
    std::size_t explored_states = 0;
};

// Breadth-first search over the product of per-literal monitors. Traces
// range over the universe's activities (closed world). Gives up with
// Unknown after `max_states` product states.
SatResult satisfiable(const ConstraintUniverse& u, std::span<const Literal> literals,
                      std::size_t max_states = 200'000);

} // namespace cosmo::declare
