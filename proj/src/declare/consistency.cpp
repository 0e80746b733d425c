#include "cosmo/declare/consistency.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "cosmo/declare/monitor.hpp"

namespace cosmo::declare {
namespace {

using Coord = std::optional<std::size_t>;

struct Term {
    Coord coordinate;
    int value;
};

class RuleChecker {
public:
    RuleChecker(const ConstraintUniverse& u, std::span<const std::int8_t> assignment, std::vector<char> demanded)
        : u_(u), assignment_(assignment), demanded_(std::move(demanded)) {}

    std::vector<Violation> run() {
        for (const auto& x : u_.activities()) unary_rules(x);
        for (std::size_t k = 0; k < u_.size(); ++k)
            if (u_[k].b) binary_rules(k);
        return std::move(out_);
    }

private:
    Coord find(Template t, const std::string& a, const std::string& b = {}) const { return u_.find(t, a, b); }

    void fire(const char* rule, std::initializer_list<Term> terms, bool demanded_only = false) {
        std::vector<std::size_t> coords;
        for (const auto& t : terms) {
            if (!t.coordinate) return;
            auto v = assignment_[*t.coordinate];
            if (v < 0 || v != t.value) return;
            if (demanded_only && !demanded_[*t.coordinate]) return;
            coords.push_back(*t.coordinate);
        }
        std::string msg;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            if (i) msg += i + 1 == coords.size() ? " and " : ", ";
            msg += u_[coords[i]].display() + "=" + std::to_string(assignment_[coords[i]]);
        }
        msg += " cannot hold together";
        out_.push_back({rule, std::move(coords), std::move(msg)});
    }

    void unary_rules(const std::string& x) {
        auto ex = find(Template::Existence, x);
        auto ab = find(Template::Absence, x);
        auto e1 = find(Template::Exactly1, x);
        fire("existence-absence", {{ex, 1}, {ab, 1}});
        fire("existence-absence", {{ex, 0}, {ab, 0}});
        fire("exactly1-absence", {{e1, 1}, {ab, 1}});
        fire("exactly1-existence", {{ex, 0}, {e1, 1}});
    }

    void binary_rules(std::size_t k) {
        const auto& inst = u_[k];
        const auto& a = inst.a;
        const auto& b = *inst.b;
        Coord self = k;
        auto ex_a = find(Template::Existence, a);
        auto ex_b = find(Template::Existence, b);
        switch (inst.tmpl) {
        case Template::ExclusiveChoice:
            fire("exclusive-choice-both-present", {{self, 1}, {ex_a, 1}, {ex_b, 1}});
            fire("exclusive-choice-none-present", {{self, 1}, {ex_a, 0}, {ex_b, 0}});
            fire("exclusive-choice-implies-choice", {{self, 1}, {find(Template::Choice, a, b), 0}});
            break;
        case Template::Choice:
            fire("choice-none-present", {{self, 1}, {ex_a, 0}, {ex_b, 0}});
            fire("choice-denied-but-present", {{self, 0}, {ex_a, 1}});
            fire("choice-denied-but-present", {{self, 0}, {ex_b, 1}});
            break;
        case Template::ChainResponse:
            fire("chain-implies-alternate", {{self, 1}, {find(Template::AlternateResponse, a, b), 0}});
            fire("chain-implies-response", {{self, 1}, {find(Template::Response, a, b), 0}});
            fire("violation-needs-activation", {{self, 0}, {ex_a, 0}});
            fire("positive-vs-negative-relation", {{self, 1}, {find(Template::NotChainSuccession, a, b), 1}}, true);
            break;
        case Template::AlternateResponse:
            fire("alternate-implies-response", {{self, 1}, {find(Template::Response, a, b), 0}});
            fire("violation-needs-activation", {{self, 0}, {ex_a, 0}});
            break;
        case Template::Response:
            fire("violation-needs-activation", {{self, 0}, {ex_a, 0}});
            fire("positive-vs-negative-relation", {{self, 1}, {find(Template::NotSuccession, a, b), 1}}, true);
            break;
        case Template::Precedence:
            fire("violation-needs-activation", {{self, 0}, {ex_b, 0}});
            break;
        case Template::NotCoExistence:
            fire("not-coexistence-both-present", {{self, 1}, {ex_a, 1}, {ex_b, 1}});
            fire("violation-needs-activation", {{self, 0}, {ex_a, 0}});
            fire("violation-needs-activation", {{self, 0}, {ex_b, 0}});
            break;
        case Template::NotSuccession:
            fire("not-succession-implies-not-chain", {{self, 1}, {find(Template::NotChainSuccession, a, b), 0}});
            fire("violation-needs-activation", {{self, 0}, {ex_a, 0}});
            fire("violation-needs-activation", {{self, 0}, {ex_b, 0}});
            break;
        case Template::NotChainSuccession:
            fire("violation-needs-activation", {{self, 0}, {ex_a, 0}});
            fire("violation-needs-activation", {{self, 0}, {ex_b, 0}});
            break;
        default: break;
        }
    }

    const ConstraintUniverse& u_;
    std::span<const std::int8_t> assignment_;
    std::vector<char> demanded_;
    std::vector<Violation> out_;
};

} // namespace

nlohmann::json to_json(const Violation& v) {
    return {{"rule", v.rule}, {"coordinates", v.coordinates}, {"message", v.message}};
}

Assignment to_assignment(const ConstraintVector& v) {
    return Assignment(v.bits.begin(), v.bits.end());
}

std::vector<Violation> check_consistency(const ConstraintUniverse& u, const ConstraintVector& v) {
    auto assignment = to_assignment(v);
    return RuleChecker(u, assignment, std::vector<char>(u.size(), 0)).run();
}

std::vector<Violation> check_consistency(const ConstraintUniverse& u, std::span<const std::int8_t> assignment,
                                         std::span<const std::size_t> demanded) {
    std::vector<char> mask(u.size(), 0);
    for (auto k : demanded) mask.at(k) = 1;
    auto out = RuleChecker(u, assignment, mask).run();
    if (!out.empty() || demanded.empty()) return out;

    std::vector<Literal> literals;
    for (auto k : demanded)
        if (assignment[k] >= 0) literals.push_back({k, assignment[k] == 1});
    if (satisfiable(u, literals).status != Satisfiability::Unsatisfiable) return out;

    // Deletion-based minimal conflicting subset.
    for (std::size_t i = 0; i < literals.size();) {
        auto trial = literals;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        if (satisfiable(u, trial).status == Satisfiability::Unsatisfiable)
            literals = std::move(trial);
        else
            ++i;
    }
    Violation v{"unsatisfiable", {}, {}};
    for (std::size_t i = 0; i < literals.size(); ++i) {
        v.coordinates.push_back(literals[i].coordinate);
        if (i) v.message += ", ";
        v.message += u[literals[i].coordinate].display() + "=" + (literals[i].value ? "1" : "0");
    }
    v.message += " cannot be satisfied by any trace";
    out.push_back(std::move(v));
    return out;
}

SatResult satisfiable(const ConstraintUniverse& u, std::span<const Literal> literals, std::size_t max_states) {
    SatResult result;
    // Activities no literal mentions behave identically; one stands for all.
    std::vector<int> symbols;
    {
        std::vector<char> mentioned(u.activities().size(), 0);
        for (const auto& l : literals) {
            mentioned[static_cast<std::size_t>(u.id_a(l.coordinate))] = 1;
            if (u.id_b(l.coordinate) >= 0) mentioned[static_cast<std::size_t>(u.id_b(l.coordinate))] = 1;
        }
        bool have_other = false;
        for (std::size_t i = 0; i < mentioned.size(); ++i) {
            if (mentioned[i])
                symbols.push_back(static_cast<int>(i));
            else if (!have_other) {
                symbols.push_back(static_cast<int>(i));
                have_other = true;
            }
        }
    }
    if (symbols.empty()) return result;

    auto accepting = [&](const std::string& s) {
        for (std::size_t i = 0; i < literals.size(); ++i) {
            const auto& inst = u[literals[i].coordinate];
            if (monitor_accepts(inst.tmpl, static_cast<MonitorState>(s[i])) != literals[i].value) return false;
        }
        return true;
    };

    struct Node {
        std::size_t parent;
        int symbol;
    };
    std::vector<std::string> states;
    std::vector<Node> nodes;
    std::unordered_map<std::string, std::size_t> seen;
    std::deque<std::size_t> queue;

    // The root stands for the empty trace, which is not a valid witness; it
    // is expanded but never accepted.
    states.emplace_back(literals.size(), '\0');
    nodes.push_back({0, -1});
    queue.push_back(0);
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        for (int sym : symbols) {
            std::string next = states[cur];
            for (std::size_t i = 0; i < literals.size(); ++i) {
                auto k = literals[i].coordinate;
                next[i] = static_cast<char>(monitor_step(u[k].tmpl, static_cast<MonitorState>(next[i]), u.id_a(k),
                                                         u.id_b(k), sym));
            }
            if (seen.count(next)) continue;
            auto id = states.size();
            seen.emplace(next, id);
            states.push_back(next);
            nodes.push_back({cur, sym});
            if (accepting(next)) {
                result.status = Satisfiability::Satisfiable;
                for (auto at = id; at != 0; at = nodes[at].parent)
                    result.witness.push_back(u.activities()[static_cast<std::size_t>(nodes[at].symbol)]);
                std::reverse(result.witness.begin(), result.witness.end());
                result.explored_states = states.size();
                return result;
            }
            if (states.size() > max_states) {
                result.explored_states = states.size();
                return result;
            }
            queue.push_back(id);
        }
    }
    result.status = Satisfiability::Unsatisfiable;
    result.explored_states = states.size();
    return result;
}

} // namespace cosmo::declare
