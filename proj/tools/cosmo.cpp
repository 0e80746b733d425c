#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "cosmo/condnet/checkpoint.hpp"
#include "cosmo/error.hpp"
#include "cosmo/interface/pipeline.hpp"
#include "cosmo/interface/service.hpp"
#include "cosmo/interface/workspace.hpp"
#include "json_config.hpp"

namespace {

using namespace cosmo;
using nlohmann::json;

void write_out(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    interface::write_file(path, text);
}

json read_json(const std::filesystem::path& path) {
    auto text = interface::read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
    auto p = path;
    p.replace_extension(suffix);
    return p;
}

struct IngestArgs {
    std::string input, output = "log.jsonl", format;
    interface::IngestOptions options;
    std::string separator = ",";
};

struct DiscoverArgs {
    std::string log, output = "universe.json";
    std::vector<std::string> groups{"all"};
    double min_support = 0.1;
};

struct TrainArgs {
    std::string log, universe, output = "model.ck", metrics, test_log, split_file;
    std::vector<std::string> groups{"all"};
    double min_support = 0.1;
    interface::TrainRequest request;
    std::string reduction = "mean";
    // grid
    std::string grid_space;
    std::size_t budget = 0;
};

struct SimulateArgs {
    std::string checkpoint, universe, output = "report.json", jsonl, base_log, base_case, base_vector, seed_activity;
    std::vector<std::string> edits;
    std::string sampling = "multinomial";
    simulator::SimulationConfig config;
};

struct ReportArgs {
    std::string report, original, output_dir = "report";
    double threshold = 0.0;
};

struct ServeArgs {
    std::string addr, workspace;
    std::size_t workers = 2;
};

void add_train_flags(CLI::App* cmd, TrainArgs& a) {
    auto& r = a.request;
    auto& t = r.train;
    cmd->add_option("--log", a.log, "Training log (.jsonl from ingest, or .xes/.csv ingested with defaults)")
        ->required();
    cmd->add_option("--universe", a.universe, "Constraint universe JSON; discovered from the log when omitted");
    cmd->add_option("--groups", a.groups, "Groups for on-the-fly discovery")->delimiter(',')->capture_default_str();
    cmd->add_option("--min-support", a.min_support, "Support threshold for on-the-fly discovery")
        ->capture_default_str();
    cmd->add_option("--lr,--learning-rate", t.learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--batch,--batch-size", t.batch_size, "Mini-batch size")->capture_default_str();
    cmd->add_option("--epochs", t.epochs, "Maximum epochs")->capture_default_str();
    cmd->add_option("--patience", t.patience, "Early-stopping patience in epochs (0 = off)")->capture_default_str();
    cmd->add_option("--seed", t.seed, "Seed for the split, initialisation and batch order")->capture_default_str();
    cmd->add_option("--lambda-time", t.lambda_time, "Weight of the remaining-time loss")->capture_default_str();
    cmd->add_option("--reduction", a.reduction, "Loss reduction over steps")
        ->check(CLI::IsMember({"mean", "sum"}))
        ->capture_default_str();
    cmd->add_option("--clip-norm", t.clip_norm, "Global gradient-norm clip")->capture_default_str();
    cmd->add_option("--beta1", t.beta1, "Adam beta1")->capture_default_str();
    cmd->add_option("--beta2", t.beta2, "Adam beta2")->capture_default_str();
    cmd->add_option("--epsilon", t.epsilon, "Adam epsilon")->capture_default_str();
    cmd->add_option("--input-size,--d-emb", r.d_emb, "Activity embedding width")->capture_default_str();
    cmd->add_option("--d-time", r.d_time, "Execution-time projection width")->capture_default_str();
    cmd->add_option("--hidden", r.hidden, "Recurrent hidden units")->capture_default_str();
    cmd->add_option("--layers", r.layers, "Recurrent layers")->capture_default_str();
    cmd->add_option("--head-hidden", r.head_hidden, "Output head width (0 = hidden)")->capture_default_str();
    cmd->add_option("--split-ratio", r.split_ratio, "Train share of the case-level split")->capture_default_str();
    cmd->add_option("--validation-ratio", r.validation_ratio, "Share of the train split used for fitting")
        ->capture_default_str();
    cmd->add_option("--split-file", a.split_file, "JSON file {\"train\": [...], \"test\": [...]} of case ids");
    cmd->add_option("--time-scale", r.time_scale, "Seconds per unit before the log transform")->capture_default_str();
}

void finish_train_args(TrainArgs& a) {
    a.request.train.reduction = a.reduction == "sum" ? condnet::Reduction::Sum : condnet::Reduction::Mean;
    if (!a.split_file.empty()) a.request.split_file = a.split_file;
}

declare::ConstraintUniverse universe_for(const TrainArgs& a, const eventlog::EventLog& log) {
    if (!a.universe.empty()) return declare::ConstraintUniverse::from_json(read_json(a.universe));
    return interface::discover(log, interface::parse_groups(a.groups), a.min_support);
}

int run_ingest(const IngestArgs& a) {
    auto options = a.options;
    if (a.separator.size() != 1) throw ValidationError("--separator must be one character");
    options.csv.separator = a.separator[0];
    std::filesystem::path input = a.input;
    eventlog::EventLog log;
    if (!a.format.empty() && ("." + a.format) != input.extension().string()) {
        auto tmp = std::filesystem::temp_directory_path() / ("cosmo-ingest-" + std::to_string(::getpid()) + "." + a.format);
        std::filesystem::copy_file(input, tmp, std::filesystem::copy_options::overwrite_existing);
        try {
            log = interface::ingest(tmp, options);
        } catch (...) {
            std::filesystem::remove(tmp);
            throw;
        }
        std::filesystem::remove(tmp);
        log.provenance.source = input.string();
    } else {
        log = interface::ingest(input, options);
    }
    interface::save_log(log, a.output);
    auto summary = interface::log_summary(log);
    std::cout << "wrote " << a.output << " (" << summary["n_traces"] << " traces, " << summary["n_events"]
              << " events, " << log.activity_set.size() << " activities)\n";
    return 0;
}

int run_discover(const DiscoverArgs& a) {
    auto log = interface::open_log(a.log);
    auto u = interface::discover(log, interface::parse_groups(a.groups), a.min_support);
    write_out(a.output, u.to_json().dump(2) + "\n");
    std::cout << "wrote " << a.output << " (" << u.size() << " constraints, fingerprint " << u.fingerprint() << ")\n";
    return 0;
}

int run_train(TrainArgs a) {
    finish_train_args(a);
    auto log = interface::open_log(a.log);
    auto u = universe_for(a, log);
    auto epochs = a.request.train.epochs;
    auto outcome = interface::train_model(log, u, a.request, [&](const condnet::EpochMetrics& m) {
        std::cerr << "epoch " << m.epoch + 1 << "/" << epochs << " train_ce " << m.train_ce;
        if (m.val_ce) std::cerr << " val_ce " << *m.val_ce << " val_acc " << *m.val_acc;
        std::cerr << "\n";
    });
    condnet::save_checkpoint(outcome.checkpoint, a.output);
    auto metrics_path = a.metrics.empty() ? sibling(a.output, ".metrics.json") : std::filesystem::path(a.metrics);
    write_out(metrics_path, outcome.metrics.dump(2) + "\n");
    auto test_path = a.test_log.empty() ? sibling(a.output, ".test.jsonl") : std::filesystem::path(a.test_log);
    if (!outcome.test.empty()) interface::save_log(outcome.test, test_path);
    std::cout << "wrote " << a.output << " (best epoch " << outcome.result.best_epoch + 1 << ", loss "
              << outcome.result.best_loss << ") and " << metrics_path.string() << "\n";
    return 0;
}

int run_grid(TrainArgs a, const std::string& output) {
    finish_train_args(a);
    auto log = interface::open_log(a.log);
    auto u = universe_for(a, log);
    auto space = a.grid_space.empty() ? condnet::GridSpace::paper() : condnet::GridSpace::from_json(read_json(a.grid_space));
    std::optional<std::size_t> budget;
    if (a.budget > 0) budget = a.budget;
    auto result = interface::run_grid(log, u, a.request, space, budget);
    write_out(output, result.to_json().dump(2) + "\n");
    const auto& b = result.best;
    std::cout << "wrote " << output << " (best lr " << b.learning_rate << ", batch " << b.batch_size << ", input "
              << b.input_size << ", hidden " << b.hidden << ", layers " << b.layers << ")\n";
    return 0;
}

int run_simulate(SimulateArgs a) {
    auto ck = condnet::load_checkpoint(a.checkpoint);
    if (!a.universe.empty())
        condnet::require_universe(ck, declare::ConstraintUniverse::from_json(read_json(a.universe)));
    auto& c = a.config;
    c.sampling = a.sampling == "argmax" ? simulator::Sampling::Argmax : simulator::Sampling::Multinomial;
    c.edits = simulator::parse_edits(ck.universe, a.edits);
    if (!a.base_case.empty()) {
        c.base_mode = simulator::BaseMode::Case;
        c.base_case = a.base_case;
    }
    if (!a.base_vector.empty()) {
        c.base_mode = simulator::BaseMode::Explicit;
        c.base_vector.clear();
        for (char ch : a.base_vector) {
            if (ch != '0' && ch != '1') throw ValidationError("--base-vector must be a string of 0 and 1");
            c.base_vector.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
    }
    if (!a.seed_activity.empty()) c.seed_activity = a.seed_activity;
    std::optional<eventlog::EventLog> base_log;
    if (!a.base_log.empty()) base_log = interface::open_log(a.base_log);
    auto report = interface::run_simulation(ck, c, base_log ? &*base_log : nullptr);
    write_out(a.output, interface::report_document(ck.universe, report));
    if (!a.jsonl.empty()) write_out(a.jsonl, simulator::to_jsonl(report));
    std::cout << "wrote " << a.output << " (" << report.traces.size() << " traces, satisfaction "
              << report.conformance.overall_rate << ", " << report.wall_clock_seconds << " s)\n";
    return 0;
}

int run_report(const ReportArgs& a) {
    auto report = read_json(a.report);
    std::optional<eventlog::EventLog> original;
    if (!a.original.empty()) original = interface::open_log(a.original);
    auto files = interface::write_report_artifacts(report, a.output_dir, a.threshold, original ? &*original : nullptr);
    std::cout << "wrote " << files.dot.string() << ", " << files.dfg_json.string() << ", "
              << files.satisfaction_csv.string();
    if (!files.coverage_csv.empty()) std::cout << ", " << files.coverage_csv.string();
    std::cout << "\n";
    return 0;
}

interface::Service* running = nullptr;

int run_serve(ServeArgs a) {
    if (a.addr.empty()) {
        const char* env = std::getenv("COSMO_ADDR");
        a.addr = env ? env : "127.0.0.1:8080";
    }
    if (a.workspace.empty()) {
        const char* env = std::getenv("COSMO_WORKSPACE");
        a.workspace = env ? env : "cosmo-workspace";
    }
    auto address = interface::parse_address(a.addr);
    interface::Service service({a.workspace, a.workers});
    int port = service.bind(address.host, address.port);
    std::cout << "listening on " << address.host << ":" << port << ", workspace " << a.workspace << std::endl;
    running = &service;
    std::signal(SIGINT, [](int) { if (running) running->stop(); });
    std::signal(SIGTERM, [](int) { if (running) running->stop(); });
    service.run();
    running = nullptr;
    return 0;
}

CLI::App* current_subcommand(CLI::App& app) {
    CLI::App* deepest = &app;
    for (auto* sub : app.get_subcommands()) deepest = sub;
    return deepest;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint-conditioned process simulation", "cosmo"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<tools::JsonConfig>(&app));
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "JSON file of option values for the subcommand (command-line flags take precedence)");

    auto configure = [](CLI::App* cmd) { cmd->fallthrough(); };

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Parse, clean and time-annotate an event log");
    configure(c_ingest);
    c_ingest->add_option("--input", ingest.input, "XES, CSV or JSONL log")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--output", ingest.output, "Canonical JSONL output")->capture_default_str();
    c_ingest->add_option("--format", ingest.format, "Override extension-based format detection")
        ->check(CLI::IsMember({"xes", "csv", "jsonl"}));
    c_ingest->add_option("--case-col", ingest.options.csv.case_col, "CSV case column")->capture_default_str();
    c_ingest->add_option("--activity-col", ingest.options.csv.activity_col, "CSV activity column")
        ->capture_default_str();
    c_ingest->add_option("--timestamp-col", ingest.options.csv.timestamp_col, "CSV timestamp column")
        ->capture_default_str();
    c_ingest->add_option("--timestamp-format", ingest.options.csv.timestamp_format,
                         "\"iso8601\", \"unix_s\", \"unix_ms\" or a strftime pattern")
        ->capture_default_str();
    c_ingest->add_option("--separator", ingest.separator, "CSV field separator")->capture_default_str();
    c_ingest->add_option("--min-len", ingest.options.clean.min_len, "Drop traces shorter than this")
        ->capture_default_str();
    c_ingest->add_option("--max-len-percentile", ingest.options.clean.max_len_percentile,
                         "Drop traces longer than this length quantile")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_ingest->add_flag("--no-clean", ingest.options.skip_clean, "Keep every trace");

    DiscoverArgs disc;
    auto* c_discover = app.add_subcommand("discover", "Ground constraint templates on a log");
    configure(c_discover);
    c_discover->add_option("--log", disc.log, "Log (.jsonl from ingest, or .xes/.csv)")->required();
    c_discover->add_option("--groups", disc.groups, "E, C, PR, NR or all")->delimiter(',')->capture_default_str();
    c_discover->add_option("--min-support", disc.min_support, "Co-occurrence support for binary templates")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_discover->add_option("--output", disc.output, "Universe JSON")->capture_default_str();

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Train the conditioned network");
    configure(c_train);
    add_train_flags(c_train, train);
    c_train->add_option("--output", train.output, "Checkpoint path")->capture_default_str();
    c_train->add_option("--metrics", train.metrics, "Metrics JSON (default: next to the checkpoint)");
    c_train->add_option("--test-log", train.test_log, "Held-out test log JSONL (default: next to the checkpoint)");

    TrainArgs grid;
    std::string grid_output = "grid.json";
    auto* c_grid = app.add_subcommand("grid", "Hyper-parameter grid search on the validation split");
    configure(c_grid);
    add_train_flags(c_grid, grid);
    c_grid->add_option("--space", grid.grid_space, "Grid JSON (default: the full 1440-point grid)");
    c_grid->add_option("--budget", grid.budget, "Evaluate a seeded sample of this many points (0 = all)")
        ->capture_default_str();
    c_grid->add_option("--output", grid_output, "Leaderboard JSON")->capture_default_str();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate traces under edited constraint conditions");
    configure(c_sim);
    c_sim->add_option("--checkpoint", sim.checkpoint, "Trained checkpoint")->required();
    c_sim->add_option("--edit", sim.edits, "Condition edit such as \"Existence(A)=1\" (repeatable)")->required();
    c_sim->add_option("--n,--n-traces", sim.config.n_traces, "Traces to generate")->capture_default_str();
    c_sim->add_option("--seed", sim.config.seed, "Simulation seed")->capture_default_str();
    c_sim->add_option("--sampling", sim.sampling, "Next-activity sampling")
        ->check(CLI::IsMember({"multinomial", "argmax"}))
        ->capture_default_str();
    c_sim->add_option("--temperature", sim.config.temperature, "Softmax temperature")->capture_default_str();
    c_sim->add_option("--max-len", sim.config.max_len, "Length cap (0 = the checkpoint's)")->capture_default_str();
    c_sim->add_option("--universe", sim.universe, "Universe JSON that must match the checkpoint");
    c_sim->add_option("--base-log", sim.base_log, "Draw base conditions from this log instead of the checkpoint");
    c_sim->add_option("--base-case", sim.base_case, "Use one base case by id");
    c_sim->add_option("--base-vector", sim.base_vector, "Explicit base vector as a string of 0/1");
    c_sim->add_option("--seed-activity", sim.seed_activity, "Fixed first activity");
    c_sim->add_flag("--grade-all", sim.config.grade_all, "Grade every constraint, not only the imposed ones");
    c_sim->add_flag("--prefix-rates", sim.config.prefix_rates, "Also report satisfaction of every trace prefix");
    c_sim->add_option("--threads", sim.config.threads, "Worker threads (0 = all cores)")->capture_default_str();
    c_sim->add_option("--output", sim.output, "Report JSON")->capture_default_str();
    c_sim->add_option("--jsonl", sim.jsonl, "Also write the traces as canonical JSONL");

    ReportArgs rep;
    auto* c_report = app.add_subcommand("report", "Write DFG, coverage and satisfaction artifacts for a report");
    configure(c_report);
    c_report->add_option("--report", rep.report, "Report JSON from simulate")->required()->check(CLI::ExistingFile);
    c_report->add_option("--original", rep.original, "Original log for the coverage comparison");
    c_report->add_option("--threshold", rep.threshold, "Drop edges below this fraction of the heaviest edge")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_report->add_option("--output-dir", rep.output_dir, "Directory for the artifacts")->capture_default_str();

    ServeArgs serve;
    auto* c_serve = app.add_subcommand("serve", "Run the HTTP service");
    configure(c_serve);
    c_serve->add_option("--addr", serve.addr, "host:port (default $COSMO_ADDR or 127.0.0.1:8080)");
    c_serve->add_option("--workspace", serve.workspace, "Artifact directory (default $COSMO_WORKSPACE or ./cosmo-workspace)");
    c_serve->add_option("--workers", serve.workers, "Job worker threads")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << current_subcommand(app)->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << current_subcommand(app)->help();
        return 1;
    }

    try {
        if (c_ingest->parsed()) return run_ingest(ingest);
        if (c_discover->parsed()) return run_discover(disc);
        if (c_train->parsed()) return run_train(train);
        if (c_grid->parsed()) return run_grid(grid, grid_output);
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_report->parsed()) return run_report(rep);
        if (c_serve->parsed()) return run_serve(serve);
    } catch (const simulator::InconsistentConditions& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v.rule << ": " << v.message << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& d : e.details()) std::cerr << "  " << d << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
