#include "cosmo/interface/service.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>

#include "cosmo/declare/consistency.hpp"
#include "cosmo/eventlog/io.hpp"
#include "cosmo/hash.hpp"
#include "cosmo/interface/pipeline.hpp"
#include "cosmo/simulator/phi_s.hpp"

namespace cosmo::interface {

namespace {

using nlohmann::json;

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("request body is not valid JSON: ") + e.what());
    }
}

const json& require(const json& body, const char* key) {
    if (!body.is_object() || !body.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
    return body[key];
}

std::string require_string(const json& body, const char* key) {
    const auto& v = require(body, key);
    if (!v.is_string()) throw ValidationError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

std::string query(const httplib::Request& req, const char* key, std::string fallback = {}) {
    return req.has_param(key) ? req.get_param_value(key) : fallback;
}

double query_number(const httplib::Request& req, const char* key, double fallback) {
    if (!req.has_param(key)) return fallback;
    auto text = req.get_param_value(key);
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("query parameter \"") + key + "\" is not a number");
}

std::string guess_format(const std::string& body) {
    auto pos = body.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (pos == std::string::npos) throw DataError("empty upload");
    if (body[pos] == '<') return "xes";
    if (body[pos] == '{') return "jsonl";
    return "csv";
}

declare::ConstraintUniverse load_universe(const Workspace& ws, const std::string& id) {
    return declare::ConstraintUniverse::from_json(json::parse(ws.get("universes", id + ".json")));
}

json universe_view(const declare::ConstraintUniverse& u) {
    json names = json::array();
    for (const auto& inst : u.instances()) names.push_back(inst.display());
    return {{"universe_id", u.fingerprint()},
            {"size", u.size()},
            {"activities", u.activities()},
            {"constraints", names},
            {"instances", u.to_json()}};
}

json violations_json(std::span<const declare::Violation> vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back(declare::to_json(v));
    return out;
}

// Translates exceptions into the documented status codes.
void handle_error(httplib::Response& res, std::exception_ptr ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const simulator::InconsistentConditions& e) {
        send(res, 400, {{"error", e.what()}, {"details", e.details()}, {"violations", violations_json(e.violations())}});
    } catch (const FingerprintMismatch& e) {
        send(res, 409, {{"error", e.what()}});
    } catch (const NotFound& e) {
        send(res, 404, {{"error", e.what()}});
    } catch (const ValidationError& e) {
        send(res, 400, {{"error", e.what()}, {"details", e.details()}});
    } catch (const DataError& e) {
        send(res, 400, {{"error", e.what()}});
    } catch (const json::exception& e) {
        send(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
    } catch (const std::exception& e) {
        send(res, 500, {{"error", e.what()}});
    } catch (...) {
        send(res, 500, {{"error", "unknown failure"}});
    }
}

} // namespace

Address parse_address(const std::string& text) {
    Address a;
    if (text.empty()) return a;
    auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        a.host = text;
        return a;
    }
    a.host = text.substr(0, colon);
    try {
        std::size_t used = 0;
        a.port = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1 || a.port < 0 || a.port > 65535) throw std::out_of_range("port");
    } catch (const std::exception&) {
        throw ValidationError("invalid address \"" + text + "\" (expected host:port)");
    }
    if (a.host.empty()) a.host = "127.0.0.1";
    return a;
}

eventlog::EventLog load_log(const Workspace& ws, const std::string& id) {
    auto path = ws.file("logs", id + ".jsonl");
    if (!std::filesystem::exists(path)) throw NotFound("unknown log \"" + id + "\"");
    return open_log(path);
}

condnet::Checkpoint load_checkpoint(const Workspace& ws, const std::string& id) {
    return condnet::deserialize_checkpoint(ws.get("checkpoints", id + ".ck"));
}

struct Service::Impl {
    Workspace ws;
    JobQueue queue;
    httplib::Server server;

    explicit Impl(const ServiceOptions& o) : ws(o.workspace), queue(ws, o.workers) { routes(); }

    void routes() {
        server.set_exception_handler(
            [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) { handle_error(res, ep); });
        server.set_payload_max_length(std::size_t{1} << 30);
        server.Post("/logs", [this](const auto& req, auto& res) { post_log(req, res); });
        server.Get("/logs/:id/summary", [this](const auto& req, auto& res) {
            send(res, 200, json::parse(ws.get("logs", req.path_params.at("id") + ".jsonl.meta.json")));
        });
        server.Post("/discover", [this](const auto& req, auto& res) { post_discover(req, res); });
        server.Get("/universes/:id", [this](const auto& req, auto& res) {
            send(res, 200, universe_view(load_universe(ws, req.path_params.at("id"))));
        });
        server.Post("/train", [this](const auto& req, auto& res) { post_train(req, res); });
        server.Get("/checkpoints/:id", [this](const auto& req, auto& res) {
            send(res, 200, json::parse(ws.get("checkpoints", req.path_params.at("id") + ".json")));
        });
        server.Get("/jobs/:id", [this](const auto& req, auto& res) {
            auto r = queue.get(req.path_params.at("id"));
            if (!r) throw NotFound("unknown job \"" + req.path_params.at("id") + "\"");
            send(res, 200, r->to_json());
        });
        server.Post("/simulate", [this](const auto& req, auto& res) { post_simulate(req, res); });
        server.Get("/reports/:id", [this](const auto& req, auto& res) {
            res.status = 200;
            res.set_content(ws.get("reports", req.path_params.at("id") + ".json"), "application/json");
        });
        server.Get("/reports/:id/dfg", [this](const auto& req, auto& res) { get_dfg(req, res); });
        server.Post("/consistency", [this](const auto& req, auto& res) { post_consistency(req, res); });
    }

    void post_log(const httplib::Request& req, httplib::Response& res) {
        auto format = query(req, "format");
        if (format.empty()) format = guess_format(req.body);
        if (format != "xes" && format != "csv" && format != "jsonl")
            throw ValidationError("format must be xes, csv or jsonl");
        IngestOptions opt;
        opt.csv.case_col = query(req, "case_col", opt.csv.case_col);
        opt.csv.activity_col = query(req, "activity_col", opt.csv.activity_col);
        opt.csv.timestamp_col = query(req, "timestamp_col", opt.csv.timestamp_col);
        opt.csv.timestamp_format = query(req, "timestamp_format", opt.csv.timestamp_format);
        auto sep = query(req, "separator", ",");
        if (sep.size() != 1) throw ValidationError("separator must be one character");
        opt.csv.separator = sep[0];
        opt.clean.min_len = static_cast<std::size_t>(query_number(req, "min_len", 3));
        opt.clean.max_len_percentile = query_number(req, "max_len_percentile", 0.9);
        opt.skip_clean = query(req, "skip_clean") == "true";

        json options = {{"format", format},
                        {"case_col", opt.csv.case_col},
                        {"activity_col", opt.csv.activity_col},
                        {"timestamp_col", opt.csv.timestamp_col},
                        {"timestamp_format", opt.csv.timestamp_format},
                        {"separator", sep},
                        {"min_len", opt.clean.min_len},
                        {"max_len_percentile", opt.clean.max_len_percentile},
                        {"skip_clean", opt.skip_clean}};
        auto id = fingerprint(options.dump() + "\n" + req.body);
        if (ws.contains("logs", id + ".jsonl.meta.json")) {
            send(res, 200, {{"log_id", id}, {"summary", json::parse(ws.get("logs", id + ".jsonl.meta.json"))}});
            return;
        }
        auto upload = id + "." + format;
        ws.put("uploads", upload, req.body);
        auto log = ingest(ws.file("uploads", upload), opt);
        log.provenance.source = upload;
        auto summary = log_summary(log);
        ws.put("logs", id + ".jsonl", eventlog::to_jsonl(log));
        ws.put("logs", id + ".jsonl.meta.json", summary.dump(2) + "\n");
        send(res, 201, {{"log_id", id}, {"summary", summary}});
    }

    void post_discover(const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto log = load_log(ws, require_string(body, "log_id"));
        std::vector<std::string> names{"all"};
        if (body.contains("groups")) names = body["groups"].get<std::vector<std::string>>();
        auto u = discover(log, parse_groups(names), body.value("min_support", 0.1));
        ws.put("universes", u.fingerprint() + ".json", u.to_json().dump(2));
        send(res, 200, universe_view(u));
    }

    void post_train(const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto log_id = require_string(body, "log_id");
        auto universe_id = require_string(body, "universe_id");
        if (!ws.contains("logs", log_id + ".jsonl")) throw NotFound("unknown log \"" + log_id + "\"");
        load_universe(ws, universe_id);
        auto request = TrainRequest::from_json(body.value("config", json::object()));
        request.split_file.reset();
        request.validate();
        auto id = fingerprint("train\n" + log_id + "\n" + universe_id + "\n" + request.to_json().dump());
        auto record = queue.submit(id, JobKind::Train, [this, log_id, universe_id, request, id](const ProgressFn& p) {
            auto log = load_log(ws, log_id);
            auto u = load_universe(ws, universe_id);
            auto epochs = static_cast<double>(request.train.epochs);
            auto outcome = train_model(log, u, request, [&](const condnet::EpochMetrics& m) {
                p(static_cast<double>(m.epoch + 1) / epochs);
            });
            ws.put("checkpoints", id + ".ck", condnet::serialize_checkpoint(outcome.checkpoint));
            ws.put("checkpoints", id + ".test.jsonl", eventlog::to_jsonl(outcome.test));
            auto metrics = outcome.metrics;
            metrics["log_id"] = log_id;
            metrics["checkpoint_id"] = id;
            ws.put("checkpoints", id + ".json", metrics.dump(2));
            return "/checkpoints/" + id;
        });
        send(res, 202, {{"job_id", id}, {"checkpoint_id", id}, {"job", record.to_json()}});
    }

    void post_simulate(const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto checkpoint_id = require_string(body, "checkpoint_id");
        auto ck = std::make_shared<condnet::Checkpoint>(load_checkpoint(ws, checkpoint_id));
        if (body.contains("universe_id") && !body["universe_id"].is_null()) {
            auto universe_id = body["universe_id"].get<std::string>();
            if (universe_id != ck->universe.fingerprint())
                throw FingerprintMismatch("universe " + universe_id + " does not match checkpoint universe " +
                                          ck->universe.fingerprint());
        }
        auto config = simulator::SimulationConfig::from_json(body, ck->universe);
        std::shared_ptr<eventlog::EventLog> base_log;
        std::string base_log_id;
        if (body.contains("base_log_id") && !body["base_log_id"].is_null()) {
            base_log_id = body["base_log_id"].get<std::string>();
            base_log = std::make_shared<eventlog::EventLog>(load_log(ws, base_log_id));
        }
        check_simulation(*ck, config, base_log.get());

        auto id = fingerprint("simulate\n" + checkpoint_id + "\n" + base_log_id + "\n" +
                              config.to_json(ck->universe).dump());
        auto record = queue.submit(id, JobKind::Simulate, [this, ck, config, base_log, checkpoint_id, id](const ProgressFn& p) {
            auto report = run_simulation(*ck, config, base_log.get(), [&](std::size_t done, std::size_t total) {
                p(static_cast<double>(done) / static_cast<double>(total));
            });
            ws.put("reports", id + ".jsonl", simulator::to_jsonl(report));
            ws.put("reports", id + ".source", checkpoint_id);
            ws.put("reports", id + ".json", report_document(ck->universe, report));
            return "/reports/" + id;
        });
        send(res, 202, {{"job_id", id}, {"report_id", id}, {"job", record.to_json()}});
    }

    void get_dfg(const httplib::Request& req, httplib::Response& res) {
        const auto& id = req.path_params.at("id");
        auto report = json::parse(ws.get("reports", id + ".json"));
        double threshold = query_number(req, "threshold", 0.0);
        if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("threshold must lie in [0, 1]");
        auto format = query(req, "format", "json");
        if (format == "dot") {
            res.status = 200;
            res.set_content(artifacts::export_dot(artifacts::build_dfg(report_traces(report)), threshold),
                            "text/vnd.graphviz");
            return;
        }
        if (format != "json") throw ValidationError("format must be json or dot");
        std::optional<eventlog::EventLog> original;
        if (ws.contains("reports", id + ".source")) {
            auto source = ws.get("reports", id + ".source");
            if (ws.contains("checkpoints", source + ".test.jsonl")) {
                std::istringstream in(ws.get("checkpoints", source + ".test.jsonl"));
                auto log = eventlog::parse_jsonl(in, source);
                if (!log.empty()) original = std::move(log);
            }
        }
        send(res, 200, dfg_view(report, threshold, original ? &*original : nullptr));
    }

    void post_consistency(const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto u = load_universe(ws, require_string(body, "universe_id"));
        const auto& vector = require(body, "vector");
        std::vector<declare::Violation> violations;
        json out;
        if (vector.is_array()) {
            auto bits = vector.get<std::vector<std::uint8_t>>();
            if (bits.size() != u.size())
                throw ValidationError("vector has " + std::to_string(bits.size()) + " coordinates, universe has " +
                                      std::to_string(u.size()));
            for (auto b : bits)
                if (b > 1) throw ValidationError("vector entries must be 0 or 1");
            auto v = u.make_vector(bits);
            if (body.contains("edits")) {
                auto edits = simulator::parse_edits(u, body["edits"].get<std::vector<std::string>>());
                try {
                    out["phi_s"] = simulator::to_json(u, simulator::build_phi_s(u, v, edits));
                } catch (const simulator::InconsistentConditions& e) {
                    violations = e.violations();
                }
            } else {
                violations = declare::check_consistency(u, v);
            }
        } else if (vector.is_object()) {
            declare::Assignment assignment(u.size(), -1);
            std::vector<std::size_t> demanded;
            for (const auto& [name, value] : vector.items()) {
                auto k = u.find(name);
                if (!k) throw ValidationError("unknown constraint \"" + name + "\"");
                auto bit = value.is_boolean() ? static_cast<int>(value.get<bool>()) : value.get<int>();
                if (bit != 0 && bit != 1) throw ValidationError("value of \"" + name + "\" must be 0 or 1");
                assignment[*k] = static_cast<std::int8_t>(bit);
                demanded.push_back(*k);
            }
            std::sort(demanded.begin(), demanded.end());
            violations = declare::check_consistency(u, assignment, demanded);
        } else {
            throw ValidationError("vector must be an array of bits or an object of constraint: bit");
        }
        out["universe_id"] = u.fingerprint();
        out["consistent"] = violations.empty();
        out["violations"] = violations_json(violations);
        send(res, 200, out);
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(options)) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
    if (port == 0) {
        int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw std::runtime_error("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port))
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

const Workspace& Service::workspace() const { return impl_->ws; }

JobQueue& Service::jobs() { return impl_->queue; }

} // namespace cosmo::interface
