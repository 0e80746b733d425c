#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosmo/condnet/checkpoint.hpp"
#include "cosmo/declare/conformance.hpp"
#include "cosmo/simulator/generate.hpp"
#include "cosmo/simulator/phi_s.hpp"

namespace cosmo::simulator {

enum class BaseMode {
    Sampled,   // per trace, a random base case whose edited coordinates differ from the edit
    Case,      // one named base case
    Explicit,  // one explicit vector
};

struct SimulationConfig {
    std::size_t n_traces = 300;
    std::size_t max_len = 0;  // 0 = the checkpoint's length cap
    Sampling sampling = Sampling::Multinomial;
    double temperature = 1.0;
    std::uint64_t seed = 42;
    std::vector<ConditionEdit> edits;
    BaseMode base_mode = BaseMode::Sampled;
    std::string base_case;
    std::vector<std::uint8_t> base_vector;
    // Fixed seed activity; otherwise the base case's first activity (or, for
    // an explicit vector, the first activity of a random base case).
    std::optional<std::string> seed_activity;
    bool grade_all = false;  // grade every coordinate instead of the mask
    bool prefix_rates = false;  // also grade every prefix of the generated traces
    std::size_t threads = 0;  // 0 = hardware concurrency

    void validate() const;
    nlohmann::json to_json(const declare::ConstraintUniverse& u) const;
    // Edits are given as text ("Existence(A)=1") under "edits".
    static SimulationConfig from_json(const nlohmann::json& j, const declare::ConstraintUniverse& u);
};

struct BaseCondition {
    std::string case_id;  // empty for an explicit vector
    PhiS phi_s;
};

struct SimulatedTrace {
    std::size_t base = 0;  // index into SimulationReport::bases
    GeneratedTrace generated;
};

struct SimulationReport {
    std::string universe_fingerprint;
    nlohmann::json config;
    std::vector<std::size_t> mask;
    std::vector<BaseCondition> bases;
    std::vector<SimulatedTrace> traces;
    declare::ConformanceReport conformance;
    // Entry t-1: share of traces with at least t events whose first t events
    // meet every graded coordinate. Filled when config.prefix_rates is set.
    std::vector<double> prefix_satisfaction;
    double wall_clock_seconds = 0.0;
};

// (case id, first activity, vector) for every trace of a log.
std::vector<condnet::BaseCase> base_cases(const eventlog::EventLog& log, const declare::ConstraintUniverse& u);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

// Generates config.n_traces traces, each from its own PRNG stream seeded with
// (seed, trace index), and grades them. Base cases default to the
// checkpoint's pool.
SimulationReport simulate(const condnet::Checkpoint& ck, const SimulationConfig& config,
                          std::span<const condnet::BaseCase> candidates = {}, const ProgressCallback& progress = {});

// Everything simulate() validates (configuration, base selection, condition
// consistency) without generating traces.
void preflight(const condnet::Checkpoint& ck, const SimulationConfig& config,
               std::span<const condnet::BaseCase> candidates = {});

// Deterministic JSON; wall-clock time is left out so identical runs produce
// identical bytes.
nlohmann::json to_json(const declare::ConstraintUniverse& u, const SimulationReport& r);

// Generated traces as canonical line-delimited JSON, timestamps accumulated
// from epoch 0.
std::string to_jsonl(const SimulationReport& r);

// Generated traces as activity sequences.
std::vector<std::vector<std::string>> activity_sequences(const SimulationReport& r);

} // namespace cosmo::simulator
