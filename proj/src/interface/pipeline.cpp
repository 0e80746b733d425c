#include "cosmo/interface/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "cosmo/artifacts/tables.hpp"
#include "cosmo/error.hpp"

namespace cosmo::interface {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

std::size_t length_cap(const eventlog::EventLog& log) {
    if (log.provenance.length_cap) return *log.provenance.length_cap;
    std::size_t cap = 0;
    for (const auto& t : log.traces) cap = std::max(cap, t.size());
    return cap;
}

condnet::NetShape shape_for(const TrainRequest& r, std::size_t vocab, std::size_t m) {
    condnet::NetShape s;
    s.vocab = vocab;
    s.m = m;
    s.d_emb = r.d_emb;
    s.d_time = r.d_time;
    s.hidden = r.hidden;
    s.layers = r.layers;
    s.head_hidden = r.head_hidden;
    return s;
}

} // namespace

eventlog::EventLog ingest(const std::filesystem::path& path, const IngestOptions& options) {
    auto log = eventlog::read_log(path, options.csv);
    if (!options.skip_clean) log = eventlog::clean(log, options.clean);
    return eventlog::derive_times(std::move(log));
}

std::filesystem::path meta_path(const std::filesystem::path& log_path) {
    auto p = log_path;
    p += ".meta.json";
    return p;
}

void save_log(const eventlog::EventLog& log, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_text(path, eventlog::to_jsonl(log));
    write_text(meta_path(path), log_summary(log).dump(2) + "\n");
}

eventlog::EventLog open_log(const std::filesystem::path& path, const IngestOptions& options) {
    auto ext = path.extension().string();
    if (ext != ".jsonl" && ext != ".ndjson") return ingest(path, options);
    auto log = eventlog::read_jsonl(path);
    auto meta = meta_path(path);
    if (std::filesystem::exists(meta)) {
        std::ifstream in(meta);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed " + meta.string() + ": " + e.what());
        }
        const auto& p = j.at("provenance");
        log.provenance.source = p.at("source").get<std::string>();
        log.provenance.format = p.at("format").get<std::string>();
        log.provenance.steps = p.at("steps").get<std::vector<std::string>>();
        if (p.at("length_cap").is_number()) log.provenance.length_cap = p["length_cap"].get<std::size_t>();
    }
    return eventlog::derive_times(std::move(log));
}

nlohmann::json log_summary(const eventlog::EventLog& log) {
    std::size_t lo = 0, hi = 0;
    double mean = 0.0;
    if (!log.traces.empty()) {
        lo = log.traces.front().size();
        for (const auto& t : log.traces) {
            lo = std::min(lo, t.size());
            hi = std::max(hi, t.size());
        }
        mean = static_cast<double>(log.event_count()) / static_cast<double>(log.traces.size());
    }
    const auto& p = log.provenance;
    return {{"n_traces", log.traces.size()},
            {"n_events", log.event_count()},
            {"activities", log.activity_set},
            {"length", {{"min", lo}, {"max", hi}, {"mean", mean}}},
            {"provenance",
             {{"source", p.source},
              {"format", p.format},
              {"steps", p.steps},
              {"length_cap", p.length_cap ? nlohmann::json(*p.length_cap) : nlohmann::json(nullptr)},
              {"fingerprint", p.fingerprint()}}}};
}

std::set<declare::Group> parse_groups(std::span<const std::string> names) {
    if (names.empty()) throw ValidationError("no constraint group selected");
    std::set<declare::Group> out;
    for (const auto& n : names) {
        auto key = upper(n);
        if (key == "ALL") {
            out = {declare::Group::E, declare::Group::C, declare::Group::PR, declare::Group::NR};
            continue;
        }
        auto g = declare::parse_group(key);
        if (!g) throw ValidationError("unknown constraint group \"" + n + "\" (expected E, C, PR, NR or all)");
        out.insert(*g);
    }
    return out;
}

declare::ConstraintUniverse discover(const eventlog::EventLog& log, const std::set<declare::Group>& groups,
                                     double min_support) {
    if (!(min_support >= 0.0 && min_support <= 1.0)) throw ValidationError("min_support must lie in [0, 1]");
    return declare::instantiate_universe(log, groups, min_support);
}

void TrainRequest::validate() const {
    train.validate();
    std::vector<std::string> errors;
    if (d_emb == 0 || d_time == 0 || hidden == 0 || layers == 0) errors.push_back("layer sizes must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) errors.push_back("split_ratio must lie in (0, 1)");
    if (!(validation_ratio > 0.0 && validation_ratio <= 1.0)) errors.push_back("validation_ratio must lie in (0, 1]");
    if (!(time_scale > 0.0)) errors.push_back("time_scale must be > 0");
    if (!errors.empty()) throw ValidationError("invalid training request: " + errors.front(), errors);
}

nlohmann::json TrainRequest::to_json() const {
    auto j = train.to_json();
    j["d_emb"] = d_emb;
    j["d_time"] = d_time;
    j["hidden"] = hidden;
    j["layers"] = layers;
    j["head_hidden"] = head_hidden;
    j["split_ratio"] = split_ratio;
    j["validation_ratio"] = validation_ratio;
    j["time_scale"] = time_scale;
    j["split_file"] = split_file ? nlohmann::json(split_file->string()) : nlohmann::json(nullptr);
    return j;
}

TrainRequest TrainRequest::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("training configuration must be a JSON object");
    TrainRequest r;
    r.train = condnet::TrainConfig::from_json(j);
    r.d_emb = j.value("d_emb", r.d_emb);
    r.d_time = j.value("d_time", r.d_time);
    r.hidden = j.value("hidden", r.hidden);
    r.layers = j.value("layers", r.layers);
    r.head_hidden = j.value("head_hidden", r.head_hidden);
    r.split_ratio = j.value("split_ratio", r.split_ratio);
    r.validation_ratio = j.value("validation_ratio", r.validation_ratio);
    r.time_scale = j.value("time_scale", r.time_scale);
    if (j.contains("split_file") && j["split_file"].is_string())
        r.split_file = j["split_file"].get<std::string>();
    return r;
}

Datasets prepare_datasets(const eventlog::EventLog& log, const TrainRequest& request) {
    eventlog::SplitSpec outer{eventlog::SplitMode::RatioByCase, request.split_ratio, request.train.seed, {}};
    if (request.split_file) {
        outer.mode = eventlog::SplitMode::ExternalFile;
        outer.external_path = request.split_file;
    }
    auto parts = eventlog::split(log, outer);
    if (parts.train.empty()) throw DataError("training split is empty");
    Datasets d;
    d.test = std::move(parts.test);
    if (request.validation_ratio >= 1.0 || parts.train.traces.size() < 2) {
        d.fit = std::move(parts.train);
        return d;
    }
    auto inner = eventlog::split(parts.train, {eventlog::SplitMode::RatioByCase, request.validation_ratio,
                                               request.train.seed + 1, {}});
    if (inner.train.empty()) {
        d.fit = std::move(parts.train);
        return d;
    }
    d.fit = std::move(inner.train);
    d.validation = std::move(inner.test);
    return d;
}

TrainOutcome train_model(const eventlog::EventLog& log, const declare::ConstraintUniverse& u,
                         const TrainRequest& request, const condnet::EpochCallback& on_epoch) {
    request.validate();
    auto data = prepare_datasets(log, request);
    eventlog::EventLog training = data.fit;
    for (const auto& t : data.validation.traces) training.traces.push_back(t);
    auto enc = condnet::fit_encoders(training, request.time_scale);

    auto fit = condnet::encode_log(data.fit, u, enc.vocab, enc.exec, enc.remaining);
    auto val = condnet::encode_log(data.validation, u, enc.vocab, enc.exec, enc.remaining);
    condnet::ConditionedNet net(shape_for(request, enc.vocab.size(), u.size()), enc.vocab, enc.exec, enc.remaining,
                                request.train.seed);
    auto result = condnet::train(net, fit, val, request.train, on_epoch);

    nlohmann::json test_metrics = nullptr;
    if (!data.test.empty()) {
        auto test = condnet::encode_log(data.test, u, enc.vocab, enc.exec, enc.remaining);
        auto r = condnet::evaluate(net, test, request.train.loss_options());
        test_metrics = {{"ce", r.ce},
                        {"mse", r.mse},
                        {"loss", r.loss},
                        {"accuracy", r.steps ? static_cast<double>(r.correct) / static_cast<double>(r.steps) : 0.0},
                        {"steps", r.steps}};
    }
    nlohmann::json history = nlohmann::json::array();
    for (const auto& e : result.history) history.push_back(e.to_json());
    nlohmann::json metrics = {{"universe_fingerprint", u.fingerprint()},
                              {"request", request.to_json()},
                              {"shape", net.shape().to_json()},
                              {"n_fit", data.fit.traces.size()},
                              {"n_validation", data.validation.traces.size()},
                              {"n_test", data.test.traces.size()},
                              {"best_epoch", result.best_epoch},
                              {"best_loss", result.best_loss},
                              {"early_stopped", result.early_stopped},
                              {"history", history},
                              {"test", test_metrics}};

    auto pool = simulator::base_cases(training, u);
    condnet::Checkpoint ck{std::move(net), u, length_cap(log), request.to_json(), std::move(pool)};
    return {std::move(ck), std::move(result), std::move(data.test), std::move(metrics)};
}

condnet::GridResult run_grid(const eventlog::EventLog& log, const declare::ConstraintUniverse& u,
                             const TrainRequest& request, const condnet::GridSpace& space,
                             std::optional<std::size_t> budget) {
    request.validate();
    auto data = prepare_datasets(log, request);
    if (data.validation.empty()) throw DataError("grid search needs a non-empty validation set");
    auto enc = condnet::fit_encoders(data.fit, request.time_scale);
    auto fit = condnet::encode_log(data.fit, u, enc.vocab, enc.exec, enc.remaining);
    auto val = condnet::encode_log(data.validation, u, enc.vocab, enc.exec, enc.remaining);
    auto evaluator = condnet::training_evaluator(enc, u.size(), fit, val, request.train, request.d_time);
    return condnet::grid_search(space, evaluator, budget, request.train.seed);
}

namespace {

std::vector<condnet::BaseCase> candidates_of(const condnet::Checkpoint& ck, const eventlog::EventLog* base_log) {
    if (!base_log) return {};
    return simulator::base_cases(*base_log, ck.universe);
}

} // namespace

simulator::SimulationReport run_simulation(const condnet::Checkpoint& ck, const simulator::SimulationConfig& config,
                                           const eventlog::EventLog* base_log,
                                           const simulator::ProgressCallback& progress) {
    auto pool = candidates_of(ck, base_log);
    return simulator::simulate(ck, config, pool, progress);
}

std::string report_document(const declare::ConstraintUniverse& u, const simulator::SimulationReport& report) {
    return simulator::to_json(u, report).dump(2) + "\n";
}

void check_simulation(const condnet::Checkpoint& ck, const simulator::SimulationConfig& config,
                      const eventlog::EventLog* base_log) {
    auto pool = candidates_of(ck, base_log);
    simulator::preflight(ck, config, pool);
}

std::vector<std::vector<std::string>> report_traces(const nlohmann::json& report) {
    if (!report.contains("traces") || !report["traces"].is_array())
        throw DataError("report has no \"traces\" array");
    std::vector<std::vector<std::string>> out;
    for (const auto& t : report["traces"]) out.push_back(t.at("activities").get<std::vector<std::string>>());
    return out;
}

nlohmann::json dfg_view(const nlohmann::json& report, double threshold, const eventlog::EventLog* original) {
    auto traces = report_traces(report);
    auto simulated = artifacts::build_dfg(traces);
    nlohmann::json out = artifacts::to_json(simulated, threshold);
    out["threshold"] = threshold;
    if (original) {
        auto rows = artifacts::coverage_delta(artifacts::build_dfg(*original), simulated);
        out["coverage_delta"] = artifacts::to_json(rows);
    }
    return out;
}

ReportFiles write_report_artifacts(const nlohmann::json& report, const std::filesystem::path& dir, double threshold,
                                   const eventlog::EventLog* original) {
    std::filesystem::create_directories(dir);
    auto traces = report_traces(report);
    auto simulated = artifacts::build_dfg(traces);
    ReportFiles files{dir / "dfg.dot", dir / "dfg.json", dir / "satisfaction.csv", {}};
    write_text(files.dot, artifacts::export_dot(simulated, threshold));
    write_text(files.dfg_json, dfg_view(report, threshold, original).dump(2) + "\n");
    write_text(files.satisfaction_csv, artifacts::satisfaction_csv(conformance_from_json(report.at("conformance"))));
    if (original) {
        files.coverage_csv = dir / "coverage.csv";
        auto rows = artifacts::coverage_delta(artifacts::build_dfg(*original), simulated);
        write_text(files.coverage_csv, artifacts::coverage_csv(rows));
    }
    return files;
}

declare::ConformanceReport conformance_from_json(const nlohmann::json& j) {
    declare::ConformanceReport r;
    r.n_traces = j.at("n_traces").get<std::size_t>();
    r.n_satisfied = j.at("n_satisfied").get<std::size_t>();
    r.overall_rate = j.at("overall_rate").get<double>();
    for (const auto& [name, rate] : j.at("per_group").items()) {
        auto g = declare::parse_group(name);
        if (!g) throw DataError("unknown group \"" + name + "\" in report");
        r.per_group[*g] = rate.get<double>();
    }
    for (const auto& c : j.at("per_constraint"))
        r.per_constraint.push_back({c.at("coordinate").get<std::size_t>(), c.at("constraint").get<std::string>(),
                                    c.at("imposed").get<int>(), c.at("rate").get<double>()});
    return r;
}

} // namespace cosmo::interface
