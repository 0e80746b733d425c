#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>

#include "cosmo/error.hpp"
#include "cosmo/eventlog/preprocess.hpp"

namespace cosmo::eventlog {
namespace {

EventLog subset(const EventLog& log, const std::vector<std::size_t>& indices, const std::string& tag) {
    EventLog out;
    out.provenance = log.provenance;
    out.provenance.steps.push_back(tag);
    for (auto i : indices) out.traces.push_back(log.traces[i]);
    refresh_activity_set(out);
    return out;
}

} // namespace

SplitResult split(const EventLog& log, const SplitSpec& spec) {
    std::vector<std::size_t> train_ix, test_ix;
    std::string tag;
    if (spec.mode == SplitMode::RatioByCase) {
        if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) throw ValidationError("split ratio must be in (0, 1)");
        std::vector<std::size_t> order(log.traces.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(spec.seed);
        std::shuffle(order.begin(), order.end(), rng);
        auto n_train = static_cast<std::size_t>(std::floor(spec.ratio * static_cast<double>(order.size())));
        train_ix.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_ix.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
        tag = "split(ratio=" + std::to_string(spec.ratio) + ",seed=" + std::to_string(spec.seed) + ")";
    } else {
        if (!spec.external_path) throw ValidationError("external split requires a file path");
        std::ifstream in(*spec.external_path);
        if (!in) throw DataError("cannot open split file '" + spec.external_path->string() + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed split file: " + std::string(e.what()));
        }
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < log.traces.size(); ++i) index.emplace(log.traces[i].case_id, i);
        std::set<std::string> seen;
        auto collect = [&](const char* key, std::vector<std::size_t>& into) {
            if (!j.contains(key)) return;
            for (const auto& id : j.at(key)) {
                auto s = id.is_string() ? id.get<std::string>() : id.dump();
                auto it = index.find(s);
                if (it == index.end()) throw DataError("split file references unknown case_id '" + s + "'");
                if (!seen.insert(s).second) throw DataError("case_id '" + s + "' listed twice in split file");
                into.push_back(it->second);
            }
        };
        collect("train", train_ix);
        collect("test", test_ix);
        std::sort(train_ix.begin(), train_ix.end());
        std::sort(test_ix.begin(), test_ix.end());
        tag = "split(file=" + spec.external_path->filename().string() + ")";
    }
    return {subset(log, train_ix, tag + "[train]"), subset(log, test_ix, tag + "[test]")};
}

} // namespace cosmo::eventlog
