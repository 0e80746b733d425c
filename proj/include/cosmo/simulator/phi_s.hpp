#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosmo/declare/consistency.hpp"
#include "cosmo/declare/universe.hpp"
#include "cosmo/error.hpp"

namespace cosmo::simulator {

struct ConditionEdit {
    std::size_t coordinate = 0;
    bool value = false;

    friend bool operator==(const ConditionEdit&, const ConditionEdit&) = default;
};

// "Existence(IV Antibiotics)=1". Throws ValidationError on unknown
// constraints or values other than 0/1.
ConditionEdit parse_edit(const declare::ConstraintUniverse& u, std::string_view text);
std::vector<ConditionEdit> parse_edits(const declare::ConstraintUniverse& u, std::span<const std::string> texts);
std::string format_edit(const declare::ConstraintUniverse& u, const ConditionEdit& e);

// A coordinate set because an edit forces it (Absence follows Existence, a
// chain response implies the weaker responses, ...).
struct Adjustment {
    std::size_t coordinate = 0;
    bool value = false;
    bool previous = false;
    std::size_t cause = 0;  // the edited coordinate
};

class InconsistentConditions : public ValidationError {
public:
    InconsistentConditions(std::vector<declare::Violation> violations, std::vector<std::string> messages)
        : ValidationError("inconsistent condition set", std::move(messages)), violations_(std::move(violations)) {}
    const std::vector<declare::Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<declare::Violation> violations_;
};

struct PhiS {
    declare::ConstraintVector vector;
    std::vector<std::size_t> mask;  // edited and adjusted coordinates, ascending
    std::vector<Adjustment> adjustments;
};

// Replaces the edited coordinates of `base`, applies the companion rules
// (never overriding an explicit edit) and validates the result with
// check_consistency, demanding the masked coordinates. Throws
// InconsistentConditions listing every violation, ValidationError on
// malformed edits.
PhiS build_phi_s(const declare::ConstraintUniverse& u, const declare::ConstraintVector& base,
                 std::span<const ConditionEdit> edits);

// The checks of build_phi_s that do not depend on the base: malformed or
// contradictory edits and inconsistencies among the edited and forced
// coordinates alone.
void check_edits(const declare::ConstraintUniverse& u, std::span<const ConditionEdit> edits);

nlohmann::json to_json(const declare::ConstraintUniverse& u, const PhiS& p);

} // namespace cosmo::simulator
