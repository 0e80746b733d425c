#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cosmo/declare/templates.hpp"
#include "cosmo/eventlog/event_log.hpp"

namespace cosmo::declare {

struct ConstraintInstance {
    Template tmpl = Template::Existence;
    std::string a;
    std::optional<std::string> b;

    // "ChainResponse(ER Sepsis Triage, CRP)"
    std::string display() const;

    friend bool operator==(const ConstraintInstance&, const ConstraintInstance&) = default;
};

// Sort key: template name, then a, then b.
bool canonical_less(const ConstraintInstance& x, const ConstraintInstance& y);

// Parses "Template(a)" / "Template(a, b)" against the given activity labels
// (labels may contain commas; the split point must produce known labels).
std::optional<ConstraintInstance> parse_instance(std::string_view text, std::span<const std::string> activities);

// Binary vector over a universe; 1 = fulfilled / imposed, 0 = violated / forbidden.
struct ConstraintVector {
    std::string universe_fingerprint;
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    friend bool operator==(const ConstraintVector&, const ConstraintVector&) = default;
};

// Fixed, ordered set of grounded constraints defining vector coordinates.
class ConstraintUniverse {
public:
    ConstraintUniverse() = default;
    // Sorts canonically; throws ValidationError on duplicates or malformed
    // instances (arity mismatch, a == b).
    explicit ConstraintUniverse(std::vector<ConstraintInstance> instances, double min_support = 0.0,
                                std::string source_fingerprint = {});

    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }
    const std::vector<ConstraintInstance>& instances() const noexcept { return instances_; }
    const ConstraintInstance& operator[](std::size_t k) const { return instances_[k]; }
    double min_support() const noexcept { return min_support_; }
    const std::string& source_fingerprint() const noexcept { return source_fingerprint_; }
    // Hash of the ordered instance list; the vector-coordinate contract.
    const std::string& fingerprint() const noexcept { return fingerprint_; }

    // Sorted labels mentioned by at least one instance; id = position.
    const std::vector<std::string>& activities() const noexcept { return activities_; }
    // -1 for labels outside the universe.
    int activity_id(const std::string& label) const;
    std::vector<int> encode(std::span<const std::string> trace) const;
    int id_a(std::size_t k) const { return ids_[k].first; }
    int id_b(std::size_t k) const { return ids_[k].second; }

    std::optional<std::size_t> index_of(const ConstraintInstance& inst) const;
    // Finds the coordinate whose display() matches `text` (see parse_instance).
    std::optional<std::size_t> find(std::string_view text) const;
    // Coordinate of `t` grounded on (a, b) if present; symmetric templates
    // are looked up in either order.
    std::optional<std::size_t> find(Template t, const std::string& a, const std::string& b = {}) const;

    ConstraintVector make_vector(std::vector<std::uint8_t> bits) const;

    // JSON array of {"template","a","b"}.
    nlohmann::json to_json() const;
    static ConstraintUniverse from_json(const nlohmann::json& j);

private:
    std::vector<ConstraintInstance> instances_;
    double min_support_ = 0.0;
    std::string source_fingerprint_;
    std::string fingerprint_;
    std::vector<std::string> activities_;
    std::unordered_map<std::string, int> activity_ids_;
    std::vector<std::pair<int, int>> ids_;
    std::unordered_map<std::string, std::size_t> by_display_;
};

// Grounds unary templates of the selected groups on every activity, binary
// ones on ordered pairs (unordered for symmetric templates) co-occurring in
// at least min_support * |traces| traces. Throws DataError when empty.
ConstraintUniverse instantiate_universe(const eventlog::EventLog& log, const std::set<Group>& groups,
                                        double min_support = 0.1);

bool evaluate(const ConstraintUniverse& u, std::size_t k, std::span<const int> encoded_trace);

// bit k = evaluate(instance_k, trace). Timestamps never matter.
ConstraintVector fulfillment_vector(const ConstraintUniverse& u, std::span<const std::string> trace);

struct AugmentedTrace {
    const eventlog::Trace* trace = nullptr;
    ConstraintVector phi;
};

// One vector per trace, in log order. The log must outlive the result.
std::vector<AugmentedTrace> augment(const eventlog::EventLog& log, const ConstraintUniverse& u);

} // namespace cosmo::declare
