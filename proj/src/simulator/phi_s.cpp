#include "cosmo/simulator/phi_s.hpp"

#include <algorithm>
#include <map>
#include <set>


namespace cosmo::simulator {

using declare::Template;

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
}

// Coordinates an edit forces, with their values.
std::vector<std::pair<std::size_t, bool>> companions(const declare::ConstraintUniverse& u, std::size_t k, bool v) {
    const auto& inst = u[k];
    std::vector<std::pair<std::size_t, bool>> out;
    auto add = [&](Template t, bool value) {
        auto c = u.find(t, inst.a, inst.b.value_or(std::string()));
        if (c) out.emplace_back(*c, value);
    };
    switch (inst.tmpl) {
    case Template::Existence:
        add(Template::Absence, !v);
        if (!v) add(Template::Exactly1, false);
        break;
    case Template::Absence:
        add(Template::Existence, !v);
        if (v) add(Template::Exactly1, false);
        break;
    case Template::Exactly1:
        if (v) {
            add(Template::Existence, true);
            add(Template::Absence, false);
        }
        break;
    case Template::ChainResponse:
        if (v) {
            add(Template::AlternateResponse, true);
            add(Template::Response, true);
        }
        break;
    case Template::AlternateResponse:
        if (v) add(Template::Response, true);
        else add(Template::ChainResponse, false);
        break;
    case Template::Response:
        if (!v) {
            add(Template::AlternateResponse, false);
            add(Template::ChainResponse, false);
        }
        break;
    default: break;
    }
    return out;
}

} // namespace

ConditionEdit parse_edit(const declare::ConstraintUniverse& u, std::string_view text) {
    auto eq = text.rfind('=');
    if (eq == std::string_view::npos)
        throw ValidationError("edit \"" + std::string(text) + "\" must look like Template(a, b)=0|1");
    auto value = trim(text.substr(eq + 1));
    if (value != "0" && value != "1")
        throw ValidationError("edit \"" + std::string(text) + "\": value must be 0 or 1");
    auto k = u.find(trim(text.substr(0, eq)));
    if (!k) throw ValidationError("edit \"" + std::string(text) + "\": constraint not in the universe");
    return {*k, value == "1"};
}

std::vector<ConditionEdit> parse_edits(const declare::ConstraintUniverse& u, std::span<const std::string> texts) {
    std::vector<ConditionEdit> out;
    for (const auto& t : texts) out.push_back(parse_edit(u, t));
    return out;
}

std::string format_edit(const declare::ConstraintUniverse& u, const ConditionEdit& e) {
    return u[e.coordinate].display() + "=" + (e.value ? "1" : "0");
}

namespace {

// With `masked_only`, coordinates outside the mask are left unassigned for
// the consistency check.
PhiS resolve(const declare::ConstraintUniverse& u, const declare::ConstraintVector& base,
             std::span<const ConditionEdit> edits, bool masked_only) {
    if (edits.empty())
        throw ValidationError("no condition edits given; conditioning on an unchanged vector reproduces the training "
                              "behaviour");
    if (base.size() != u.size())
        throw ValidationError("base vector has " + std::to_string(base.size()) + " coordinates, universe has " +
                              std::to_string(u.size()));
    std::map<std::size_t, bool> explicit_edits;
    std::vector<std::string> errors;
    for (const auto& e : edits) {
        if (e.coordinate >= u.size()) throw ValidationError("edit coordinate " + std::to_string(e.coordinate) + " out of range");
        auto [it, fresh] = explicit_edits.emplace(e.coordinate, e.value);
        if (!fresh && it->second != e.value)
            errors.push_back(u[e.coordinate].display() + " is edited to both 0 and 1");
    }
    if (!errors.empty()) throw ValidationError("contradictory condition edits", errors);

    PhiS out;
    out.vector = base;
    for (const auto& [k, v] : explicit_edits) out.vector.bits[k] = v;
    std::map<std::size_t, bool> forced;
    for (const auto& [k, v] : explicit_edits)
        for (const auto& [c, cv] : companions(u, k, v)) {
            if (explicit_edits.count(c)) continue;
            auto [it, fresh] = forced.emplace(c, cv);
            if (!fresh && it->second != cv) {
                errors.push_back("edits force " + u[c].display() + " to both 0 and 1");
                continue;
            }
            if (fresh) out.adjustments.push_back({c, cv, base.bits[c] == 1, k});
        }
    if (!errors.empty()) throw ValidationError("contradictory condition edits", errors);
    for (const auto& a : out.adjustments) out.vector.bits[a.coordinate] = a.value;

    std::set<std::size_t> mask;
    for (const auto& [k, v] : explicit_edits) mask.insert(k);
    for (const auto& a : out.adjustments) mask.insert(a.coordinate);
    out.mask.assign(mask.begin(), mask.end());

    auto assignment = declare::to_assignment(out.vector);
    if (masked_only) {
        declare::Assignment partial(assignment.size(), -1);
        for (auto k : out.mask) partial[k] = assignment[k];
        assignment = std::move(partial);
    }
    auto violations = declare::check_consistency(u, assignment, out.mask);
    if (!violations.empty()) {
        for (const auto& v : violations) errors.push_back(v.message);
        throw InconsistentConditions(violations, errors);
    }
    return out;
}

} // namespace

PhiS build_phi_s(const declare::ConstraintUniverse& u, const declare::ConstraintVector& base,
                 std::span<const ConditionEdit> edits) {
    return resolve(u, base, edits, false);
}

void check_edits(const declare::ConstraintUniverse& u, std::span<const ConditionEdit> edits) {
    resolve(u, u.make_vector(std::vector<std::uint8_t>(u.size(), 0)), edits, true);
}

nlohmann::json to_json(const declare::ConstraintUniverse& u, const PhiS& p) {
    nlohmann::json adj = nlohmann::json::array();
    for (const auto& a : p.adjustments)
        adj.push_back({{"coordinate", a.coordinate},
                       {"constraint", u[a.coordinate].display()},
                       {"value", a.value ? 1 : 0},
                       {"previous", a.previous ? 1 : 0},
                       {"because_of", u[a.cause].display()}});
    return {{"vector", p.vector.bits}, {"mask", p.mask}, {"adjustments", adj}};
}

} // namespace cosmo::simulator
