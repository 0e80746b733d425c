#include "cosmo/simulator/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "cosmo/error.hpp"

namespace cosmo::simulator {

namespace {

std::string_view mode_name(BaseMode m) {
    switch (m) {
    case BaseMode::Sampled: return "sampled";
    case BaseMode::Case: return "case";
    case BaseMode::Explicit: return "explicit";
    }
    return "?";
}

std::mt19937_64 trace_stream(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t{index} >> 32)};
    return std::mt19937_64(seq);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

} // namespace

void SimulationConfig::validate() const {
    std::vector<std::string> errors;
    if (n_traces == 0) errors.push_back("n_traces must be >= 1");
    if (sampling == Sampling::Multinomial && !(temperature > 0.0)) errors.push_back("temperature must be > 0");
    if (edits.empty()) errors.push_back("at least one condition edit is required");
    if (base_mode == BaseMode::Case && base_case.empty()) errors.push_back("base case id missing");
    if (base_mode == BaseMode::Explicit && base_vector.empty()) errors.push_back("base vector missing");
    if (!errors.empty()) throw ValidationError("invalid simulation configuration", errors);
}

nlohmann::json SimulationConfig::to_json(const declare::ConstraintUniverse& u) const {
    nlohmann::json edits_json = nlohmann::json::array();
    for (const auto& e : edits) edits_json.push_back(format_edit(u, e));
    nlohmann::json j = {{"n_traces", n_traces},
                        {"max_len", max_len},
                        {"sampling", sampling == Sampling::Argmax ? "argmax" : "multinomial"},
                        {"temperature", temperature},
                        {"seed", seed},
                        {"edits", edits_json},
                        {"base_mode", mode_name(base_mode)},
                        {"grade_all", grade_all}};
    if (base_mode == BaseMode::Case) j["base_case"] = base_case;
    if (base_mode == BaseMode::Explicit) j["base_vector"] = base_vector;
    if (seed_activity) j["seed_activity"] = *seed_activity;
    if (prefix_rates) j["prefix_rates"] = true;
    return j;
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j, const declare::ConstraintUniverse& u) {
    SimulationConfig c;
    try {
        c.n_traces = j.value("n_traces", c.n_traces);
        c.max_len = j.value("max_len", c.max_len);
        auto s = j.value("sampling", std::string("multinomial"));
        if (s != "multinomial" && s != "argmax") throw ValidationError("sampling must be \"multinomial\" or \"argmax\"");
        c.sampling = s == "argmax" ? Sampling::Argmax : Sampling::Multinomial;
        c.temperature = j.value("temperature", c.temperature);
        c.seed = j.value("seed", c.seed);
        if (j.contains("edits")) c.edits = parse_edits(u, j["edits"].get<std::vector<std::string>>());
        auto mode = j.value("base_mode", std::string());
        if (j.contains("base_case")) c.base_case = j["base_case"].get<std::string>();
        if (j.contains("base_vector")) c.base_vector = j["base_vector"].get<std::vector<std::uint8_t>>();
        if (mode.empty()) mode = !c.base_vector.empty() ? "explicit" : !c.base_case.empty() ? "case" : "sampled";
        if (mode == "sampled") c.base_mode = BaseMode::Sampled;
        else if (mode == "case") c.base_mode = BaseMode::Case;
        else if (mode == "explicit") c.base_mode = BaseMode::Explicit;
        else throw ValidationError("base_mode must be sampled, case or explicit");
        if (j.contains("seed_activity") && !j["seed_activity"].is_null())
            c.seed_activity = j["seed_activity"].get<std::string>();
        c.grade_all = j.value("grade_all", false);
        c.prefix_rates = j.value("prefix_rates", false);
        c.threads = j.value("threads", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed simulation configuration: ") + e.what());
    }
    return c;
}

std::vector<condnet::BaseCase> base_cases(const eventlog::EventLog& log, const declare::ConstraintUniverse& u) {
    std::vector<condnet::BaseCase> out;
    for (const auto& aug : declare::augment(log, u)) {
        if (aug.trace->events.empty()) continue;
        out.push_back({aug.trace->case_id, aug.trace->events.front().activity, aug.phi.bits});
    }
    return out;
}

namespace {

struct Plan {
    SimulationReport report;
    GenerationOptions gen;
    std::vector<std::mt19937_64> streams;
    std::vector<std::string> seeds;
};

// Resolves base conditions, seed activities and PRNG streams per trace.
Plan make_plan(const condnet::Checkpoint& ck, const SimulationConfig& config,
               std::span<const condnet::BaseCase> candidates) {
    config.validate();
    const auto& u = ck.universe;
    if (candidates.empty()) candidates = ck.base_pool;

    Plan plan;
    plan.gen = {config.sampling, config.temperature, config.max_len ? config.max_len : ck.length_cap};
    const auto& gen = plan.gen;
    if (gen.max_len == 0) throw ValidationError("max_len is 0 and the checkpoint carries no length cap");

    auto& report = plan.report;
    report.universe_fingerprint = u.fingerprint();
    report.config = config.to_json(u);
    report.config["max_len"] = gen.max_len;

    // Plan: base condition and seed activity per trace, drawn from the
    // trace's own stream so the plan does not depend on threading.
    auto& streams = plan.streams;
    auto& seeds = plan.seeds;
    seeds.resize(config.n_traces);
    report.traces.resize(config.n_traces);
    std::map<std::size_t, std::size_t> base_of_candidate;

    auto add_base = [&](std::string case_id, const std::vector<std::uint8_t>& bits) {
        report.bases.push_back({std::move(case_id), build_phi_s(u, u.make_vector(bits), config.edits)});
        return report.bases.size() - 1;
    };
    auto require_pool = [&](const char* why) {
        if (candidates.empty())
            throw ValidationError(std::string("no base cases available to ") + why +
                                  "; pass a test log or an explicit seed activity");
    };

    // Contradictions among the edits themselves do not depend on the base.
    check_edits(u, config.edits);

    std::vector<const condnet::BaseCase*> eligible;
    if (config.base_mode == BaseMode::Sampled) {
        require_pool("sample base conditions from");
        for (const auto& c : candidates) {
            if (c.bits.size() != u.size())
                throw FingerprintMismatch("base case " + c.case_id + " has a vector of the wrong length");
            bool flipped = true;
            for (const auto& e : config.edits) flipped = flipped && (c.bits[e.coordinate] == 1) != e.value;
            if (flipped) eligible.push_back(&c);
        }
        if (eligible.empty())
            throw ValidationError("no base case has every edited coordinate opposite to its edit; nothing to flip");
    }
    std::size_t single = 0;
    if (config.base_mode == BaseMode::Case) {
        const condnet::BaseCase* found = nullptr;
        for (const auto& c : candidates)
            if (c.case_id == config.base_case) found = &c;
        if (!found) throw DataError("unknown base case \"" + config.base_case + "\"");
        single = add_base(found->case_id, found->bits);
        if (!config.seed_activity)
            for (auto& s : seeds) s = found->first_activity;
    } else if (config.base_mode == BaseMode::Explicit) {
        if (config.base_vector.size() != u.size())
            throw ValidationError("base vector has " + std::to_string(config.base_vector.size()) +
                                  " coordinates, universe has " + std::to_string(u.size()));
        single = add_base("", config.base_vector);
        if (!config.seed_activity) require_pool("draw seed activities from");
    }

    for (std::size_t i = 0; i < config.n_traces; ++i) {
        auto rng = trace_stream(config.seed, i);
        if (config.base_mode == BaseMode::Sampled) {
            std::size_t c = pick(rng, eligible.size());
            auto it = base_of_candidate.find(c);
            if (it == base_of_candidate.end())
                it = base_of_candidate.emplace(c, add_base(eligible[c]->case_id, eligible[c]->bits)).first;
            report.traces[i].base = it->second;
            seeds[i] = eligible[c]->first_activity;
        } else {
            report.traces[i].base = single;
            if (config.base_mode == BaseMode::Explicit && !config.seed_activity)
                seeds[i] = candidates[pick(rng, candidates.size())].first_activity;
        }
        if (config.seed_activity) seeds[i] = *config.seed_activity;
        streams.push_back(rng);
    }
    return plan;
}

} // namespace

void preflight(const condnet::Checkpoint& ck, const SimulationConfig& config,
               std::span<const condnet::BaseCase> candidates) {
    make_plan(ck, config, candidates);
}

SimulationReport simulate(const condnet::Checkpoint& ck, const SimulationConfig& config,
                          std::span<const condnet::BaseCase> candidates, const ProgressCallback& progress) {
    auto started = std::chrono::steady_clock::now();
    const auto& u = ck.universe;
    Plan plan = make_plan(ck, config, candidates);
    auto& report = plan.report;
    const auto& gen = plan.gen;
    auto& streams = plan.streams;
    const auto& seeds = plan.seeds;

    std::vector<Eigen::VectorXd> conditions;
    for (const auto& b : report.bases) {
        Eigen::VectorXd c(static_cast<Eigen::Index>(u.size()));
        for (std::size_t k = 0; k < u.size(); ++k) c[static_cast<Eigen::Index>(k)] = b.phi_s.vector.bits[k];
        conditions.push_back(std::move(c));
    }

    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.n_traces);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= config.n_traces) return;
            try {
                report.traces[i].generated =
                    generate_trace(ck.net, conditions[report.traces[i].base], seeds[i], gen, streams[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = config.n_traces;
                return;
            }
            std::size_t n = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(n, config.n_traces);
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    if (config.grade_all) {
        for (std::size_t k = 0; k < u.size(); ++k) report.mask.push_back(k);
    } else {
        report.mask = report.bases.front().phi_s.mask;
    }
    std::vector<declare::ConstraintVector> imposed;
    for (const auto& t : report.traces) imposed.push_back(report.bases[t.base].phi_s.vector);
    auto sequences = activity_sequences(report);
    report.conformance = declare::conformance_report(u, sequences, imposed, report.mask);
    if (config.prefix_rates) {
        std::vector<std::size_t> seen, hits;
        for (std::size_t i = 0; i < sequences.size(); ++i) {
            auto encoded = u.encode(sequences[i]);
            if (encoded.size() > seen.size()) {
                seen.resize(encoded.size(), 0);
                hits.resize(encoded.size(), 0);
            }
            for (std::size_t t = 1; t <= encoded.size(); ++t) {
                std::span<const int> prefix(encoded.data(), t);
                bool ok = std::all_of(report.mask.begin(), report.mask.end(), [&](std::size_t k) {
                    return declare::evaluate(u, k, prefix) == (imposed[i].bits[k] == 1);
                });
                ++seen[t - 1];
                hits[t - 1] += ok;
            }
        }
        for (std::size_t t = 0; t < seen.size(); ++t)
            report.prefix_satisfaction.push_back(static_cast<double>(hits[t]) / static_cast<double>(seen[t]));
    }
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

} // namespace cosmo::simulator
