#pragma once

#include <string>
#include <vector>

#include "cosmo/condnet/checkpoint.hpp"
#include "cosmo/condnet/trainer.hpp"
#include "cosmo/eventlog/preprocess.hpp"

namespace cosmo::testing {

// One trace per string, one character per activity, events a minute apart
// growing linearly so that times are not constant.
inline eventlog::EventLog letter_log(const std::vector<std::string>& traces) {
    std::vector<eventlog::Trace> out;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        eventlog::Trace t{"c" + std::to_string(i), {}};
        for (std::size_t j = 0; j < traces[i].size(); ++j)
            t.events.push_back({std::string(1, traces[i][j]), static_cast<TimestampMs>(60'000 * j * (j + 1))});
        out.push_back(t);
    }
    return eventlog::derive_times(eventlog::make_log(out));
}

inline std::vector<std::string> letters(const std::string& s) {
    std::vector<std::string> out;
    for (char c : s) out.emplace_back(1, c);
    return out;
}

// Small net trained until it reproduces `log` (intended for tiny logs).
inline condnet::Checkpoint trained_checkpoint(const eventlog::EventLog& log, const declare::ConstraintUniverse& u,
                                              std::size_t epochs = 200, std::uint64_t seed = 1) {
    auto enc = condnet::fit_encoders(log);
    auto samples = condnet::encode_log(log, u, enc.vocab, enc.exec, enc.remaining);
    condnet::NetShape shape;
    shape.vocab = enc.vocab.size();
    shape.m = u.size();
    shape.d_emb = 16;
    shape.hidden = 32;
    condnet::ConditionedNet net(shape, enc.vocab, enc.exec, enc.remaining, seed);
    condnet::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = 4;
    cfg.learning_rate = 1e-2;
    cfg.patience = 0;
    cfg.seed = seed;
    condnet::train(net, samples, {}, cfg);
    std::size_t cap = 0;
    for (const auto& t : log.traces) cap = std::max(cap, t.events.size());
    condnet::Checkpoint ck{std::move(net), u, cap + 2, cfg.to_json(), {}};
    for (const auto& aug : declare::augment(log, u))
        ck.base_pool.push_back({aug.trace->case_id, aug.trace->events.front().activity, aug.phi.bits});
    return ck;
}

} // namespace cosmo::testing
