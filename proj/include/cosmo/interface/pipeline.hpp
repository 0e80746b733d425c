#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosmo/artifacts/dfg.hpp"
#include "cosmo/condnet/checkpoint.hpp"
#include "cosmo/condnet/grid_search.hpp"
#include "cosmo/condnet/trainer.hpp"
#include "cosmo/declare/universe.hpp"
#include "cosmo/eventlog/io.hpp"
#include "cosmo/eventlog/preprocess.hpp"
#include "cosmo/simulator/simulate.hpp"

// Pipeline stages shared by the command line and the HTTP service.
namespace cosmo::interface {

struct IngestOptions {
    eventlog::CsvMapping csv;
    eventlog::CleanOptions clean;
    bool skip_clean = false;
};

// read_log, clean, derive_times.
eventlog::EventLog ingest(const std::filesystem::path& path, const IngestOptions& options = {});

// Canonical JSONL plus a sidecar "<path>.meta.json" holding the summary, so
// that provenance (the length cap in particular) survives the round trip.
void save_log(const eventlog::EventLog& log, const std::filesystem::path& path);
// Canonical JSONL (provenance restored from the sidecar when present) or,
// for any other extension, ingest() with default options.
eventlog::EventLog open_log(const std::filesystem::path& path, const IngestOptions& options = {});
std::filesystem::path meta_path(const std::filesystem::path& log_path);

// {"n_traces","n_events","activities","length":{min,max,mean},"provenance":{...}}
nlohmann::json log_summary(const eventlog::EventLog& log);

// Group names "E", "C", "PR", "NR" (case-insensitive) or "all". Throws
// ValidationError on anything else or an empty list.
std::set<declare::Group> parse_groups(std::span<const std::string> names);

declare::ConstraintUniverse discover(const eventlog::EventLog& log, const std::set<declare::Group>& groups,
                                     double min_support = 0.1);

// Everything needed to go from a preprocessed log to a checkpoint. `train.seed`
// drives the split, the initialisation and the batch order.
struct TrainRequest {
    condnet::TrainConfig train;
    std::size_t d_emb = 32;
    std::size_t d_time = 8;
    std::size_t hidden = 128;
    std::size_t layers = 1;
    std::size_t head_hidden = 0;
    double split_ratio = 0.8;
    double validation_ratio = 0.9;  // share of the training split used for fitting
    double time_scale = 1.0;
    std::optional<std::filesystem::path> split_file;

    void validate() const;
    // Flat object; missing keys keep their defaults.
    nlohmann::json to_json() const;
    static TrainRequest from_json(const nlohmann::json& j);
};

struct Datasets {
    eventlog::EventLog fit, validation, test;
};

// Train/test split, then a second split of the training part into fitting
// and validation sets.
Datasets prepare_datasets(const eventlog::EventLog& log, const TrainRequest& request);

struct TrainOutcome {
    condnet::Checkpoint checkpoint;
    condnet::TrainResult result;
    eventlog::EventLog test;
    nlohmann::json metrics;
};

TrainOutcome train_model(const eventlog::EventLog& log, const declare::ConstraintUniverse& u,
                         const TrainRequest& request, const condnet::EpochCallback& on_epoch = {});

condnet::GridResult run_grid(const eventlog::EventLog& log, const declare::ConstraintUniverse& u,
                             const TrainRequest& request, const condnet::GridSpace& space,
                             std::optional<std::size_t> budget = {});

// Base cases come from `base_log` when given, else from the checkpoint.
simulator::SimulationReport run_simulation(const condnet::Checkpoint& ck, const simulator::SimulationConfig& config,
                                           const eventlog::EventLog* base_log = nullptr,
                                           const simulator::ProgressCallback& progress = {});

// Report JSON as written to disk (pretty-printed, newline-terminated).
std::string report_document(const declare::ConstraintUniverse& u, const simulator::SimulationReport& report);

// Same checks as run_simulation without generating.
void check_simulation(const condnet::Checkpoint& ck, const simulator::SimulationConfig& config,
                      const eventlog::EventLog* base_log = nullptr);

// Activity sequences of the "traces" array of a report JSON.
std::vector<std::vector<std::string>> report_traces(const nlohmann::json& report);

// DFG of the simulated traces plus, when `original` is given, its coverage
// delta against that log.
nlohmann::json dfg_view(const nlohmann::json& report, double threshold, const eventlog::EventLog* original = nullptr);

struct ReportFiles {
    std::filesystem::path dot, dfg_json, satisfaction_csv, coverage_csv;
};

// Writes dfg.dot, dfg.json, satisfaction.csv and (with `original`)
// coverage.csv into `dir`.
ReportFiles write_report_artifacts(const nlohmann::json& report, const std::filesystem::path& dir, double threshold,
                                   const eventlog::EventLog* original = nullptr);

// Inverse of declare::to_json(ConformanceReport), without the per-trace part.
declare::ConformanceReport conformance_from_json(const nlohmann::json& j);

} // namespace cosmo::interface
