#include "cosmo/declare/universe.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cosmo/declare/evaluate.hpp"
#include "cosmo/error.hpp"
#include "cosmo/hash.hpp"

namespace cosmo::declare {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool known(std::span<const std::string> acts, std::string_view label) {
    return acts.empty() || std::find(acts.begin(), acts.end(), label) != acts.end();
}

} // namespace

std::string ConstraintInstance::display() const {
    std::string out(name(tmpl));
    out += '(';
    out += a;
    if (b) {
        out += ", ";
        out += *b;
    }
    out += ')';
    return out;
}

bool canonical_less(const ConstraintInstance& x, const ConstraintInstance& y) {
    auto nx = name(x.tmpl), ny = name(y.tmpl);
    if (nx != ny) return nx < ny;
    if (x.a != y.a) return x.a < y.a;
    return x.b.value_or("") < y.b.value_or("");
}

std::optional<ConstraintInstance> parse_instance(std::string_view text, std::span<const std::string> activities) {
    text = trim(text);
    auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') return std::nullopt;
    auto tmpl = parse_template(text.substr(0, open));
    auto args = text.substr(open + 1, text.size() - open - 2);
    if (!tmpl) return std::nullopt;
    // "Exactly(1, a)" spelling
    if (*tmpl == Template::Exactly1) {
        auto t = trim(args);
        if (t.size() > 2 && t[0] == '1' && t[1] == ',') args = t.substr(2);
    }
    if (arity(*tmpl) == 1) {
        auto a = trim(args);
        if (a.empty() || !known(activities, a)) return std::nullopt;
        return ConstraintInstance{*tmpl, std::string(a), std::nullopt};
    }
    for (auto pos = args.find(','); pos != std::string_view::npos; pos = args.find(',', pos + 1)) {
        auto a = trim(args.substr(0, pos));
        auto b = trim(args.substr(pos + 1));
        if (!a.empty() && !b.empty() && known(activities, a) && known(activities, b))
            return ConstraintInstance{*tmpl, std::string(a), std::string(b)};
    }
    return std::nullopt;
}

ConstraintUniverse::ConstraintUniverse(std::vector<ConstraintInstance> instances, double min_support,
                                       std::string source_fingerprint)
    : instances_(std::move(instances)), min_support_(min_support), source_fingerprint_(std::move(source_fingerprint)) {
    for (const auto& inst : instances_) {
        if ((arity(inst.tmpl) == 2) != inst.b.has_value())
            throw ValidationError("arity mismatch for constraint " + inst.display());
        if (inst.b && *inst.b == inst.a) throw ValidationError("constraint " + inst.display() + " repeats its activity");
    }
    std::sort(instances_.begin(), instances_.end(), canonical_less);
    for (std::size_t k = 1; k < instances_.size(); ++k)
        if (instances_[k] == instances_[k - 1])
            throw ValidationError("duplicate constraint " + instances_[k].display());

    std::set<std::string> acts;
    for (const auto& inst : instances_) {
        acts.insert(inst.a);
        if (inst.b) acts.insert(*inst.b);
    }
    activities_.assign(acts.begin(), acts.end());
    for (std::size_t i = 0; i < activities_.size(); ++i) activity_ids_.emplace(activities_[i], static_cast<int>(i));
    std::string canon;
    for (std::size_t k = 0; k < instances_.size(); ++k) {
        const auto& inst = instances_[k];
        ids_.emplace_back(activity_id(inst.a), inst.b ? activity_id(*inst.b) : -1);
        by_display_.emplace(inst.display(), k);
        canon += inst.display();
        canon += '\n';
    }
    fingerprint_ = cosmo::fingerprint(canon);
}

int ConstraintUniverse::activity_id(const std::string& label) const {
    auto it = activity_ids_.find(label);
    return it == activity_ids_.end() ? -1 : it->second;
}

std::vector<int> ConstraintUniverse::encode(std::span<const std::string> trace) const {
    std::vector<int> out;
    out.reserve(trace.size());
    for (const auto& s : trace) out.push_back(activity_id(s));
    return out;
}

std::optional<std::size_t> ConstraintUniverse::index_of(const ConstraintInstance& inst) const {
    auto it = by_display_.find(inst.display());
    if (it != by_display_.end()) return it->second;
    if (symmetric(inst.tmpl) && inst.b) {
        it = by_display_.find(ConstraintInstance{inst.tmpl, *inst.b, inst.a}.display());
        if (it != by_display_.end()) return it->second;
    }
    return std::nullopt;
}

std::optional<std::size_t> ConstraintUniverse::find(std::string_view text) const {
    auto inst = parse_instance(text, activities_);
    if (!inst) return std::nullopt;
    return index_of(*inst);
}

std::optional<std::size_t> ConstraintUniverse::find(Template t, const std::string& a, const std::string& b) const {
    ConstraintInstance inst{t, a, std::nullopt};
    if (arity(t) == 2) inst.b = b;
    return index_of(inst);
}

ConstraintVector ConstraintUniverse::make_vector(std::vector<std::uint8_t> bits) const {
    if (bits.size() != size())
        throw ValidationError("constraint vector has " + std::to_string(bits.size()) + " coordinates, universe has " +
                              std::to_string(size()));
    for (auto& b : bits)
        if (b > 1) throw ValidationError("constraint vector entries must be 0 or 1");
    return ConstraintVector{fingerprint_, std::move(bits)};
}

nlohmann::json ConstraintUniverse::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& inst : instances_)
        arr.push_back({{"template", name(inst.tmpl)}, {"a", inst.a}, {"b", inst.b ? nlohmann::json(*inst.b) : nullptr}});
    return arr;
}

ConstraintUniverse ConstraintUniverse::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw SchemaError("universe JSON must be an array of {template, a, b}");
    std::vector<ConstraintInstance> out;
    for (const auto& item : j) {
        auto tname = item.at("template").get<std::string>();
        auto t = parse_template(tname);
        if (!t) throw SchemaError("unknown DECLARE template '" + tname + "'");
        ConstraintInstance inst{*t, item.at("a").get<std::string>(), std::nullopt};
        if (item.contains("b") && !item.at("b").is_null()) inst.b = item.at("b").get<std::string>();
        out.push_back(std::move(inst));
    }
    return ConstraintUniverse(std::move(out));
}

ConstraintUniverse instantiate_universe(const eventlog::EventLog& log, const std::set<Group>& groups,
                                        double min_support) {
    if (!(min_support >= 0.0 && min_support <= 1.0)) throw ValidationError("min_support must be in [0, 1]");
    const auto& acts = log.activity_set;
    const auto n = acts.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(acts[i], i);

    std::vector<std::size_t> co(n * n, 0);
    for (const auto& t : log.traces) {
        std::vector<char> present(n, 0);
        for (const auto& e : t.events) present[index.at(e.activity)] = 1;
        for (std::size_t i = 0; i < n; ++i)
            if (present[i])
                for (std::size_t j = 0; j < n; ++j)
                    if (present[j] && i != j) ++co[i * n + j];
    }
    const double needed = min_support * static_cast<double>(log.traces.size());

    std::vector<ConstraintInstance> instances;
    for (auto t : kAllTemplates) {
        if (!groups.count(group(t))) continue;
        if (arity(t) == 1) {
            for (const auto& a : acts) instances.push_back({t, a, std::nullopt});
            continue;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || (symmetric(t) && j < i)) continue;
                if (static_cast<double>(co[i * n + j]) < needed) continue;
                instances.push_back({t, acts[i], acts[j]});
            }
    }
    if (instances.empty())
        throw DataError("constraint universe is empty: no activity pair reaches min_support=" +
                        std::to_string(min_support) + "; try a lower --min-support");
    return ConstraintUniverse(std::move(instances), min_support, log.provenance.fingerprint());
}

bool evaluate(const ConstraintUniverse& u, std::size_t k, std::span<const int> encoded_trace) {
    return declare::evaluate(u[k].tmpl, u.id_a(k), u.id_b(k), encoded_trace);
}

ConstraintVector fulfillment_vector(const ConstraintUniverse& u, std::span<const std::string> trace) {
    auto enc = u.encode(trace);
    std::vector<std::uint8_t> bits(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) bits[k] = evaluate(u, k, enc) ? 1 : 0;
    return ConstraintVector{u.fingerprint(), std::move(bits)};
}

std::vector<AugmentedTrace> augment(const eventlog::EventLog& log, const ConstraintUniverse& u) {
    if (u.empty()) throw ValidationError("cannot augment with an empty constraint universe");
    std::vector<AugmentedTrace> out;
    out.reserve(log.traces.size());
    for (const auto& t : log.traces) {
        auto acts = t.activities();
        out.push_back({&t, fulfillment_vector(u, acts)});
    }
    return out;
}

} // namespace cosmo::declare
