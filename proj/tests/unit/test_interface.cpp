#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "cosmo/declare/consistency.hpp"
#include "cosmo/eventlog/io.hpp"
#include "cosmo/interface/jobs.hpp"
#include "cosmo/interface/pipeline.hpp"
#include "cosmo/interface/service.hpp"
#include "cosmo/interface/workspace.hpp"
#include "support/fixtures.hpp"

// after Eigen: <resolv.h> defines a _res macro
#include <httplib.h>
#include <sys/wait.h>

using namespace cosmo;
using namespace cosmo::interface;
using nlohmann::json;
using cosmo::testing::letter_log;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("cosmo-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every trace has length 4 so cleaning keeps all of them; "d" appears in
// about half the traces.
eventlog::EventLog training_log() {
    std::vector<std::string> traces;
    for (int i = 0; i < 6; ++i)
        for (const char* t : {"abce", "abde", "acbe", "adce"}) traces.push_back(t);
    return letter_log(traces);
}

struct RunResult {
    int code;
    std::string output;
};

RunResult run_cli(const std::string& args, const std::filesystem::path& dir) {
    auto out = dir / "cli-output.txt";
    auto command = "cd '" + dir.string() + "' && '" COSMO_CLI "' " + args + " > '" + out.string() + "' 2>&1";
    int status = std::system(command.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

const json kTrainConfig = {{"epochs", 60}, {"hidden", 16},         {"d_emb", 8}, {"d_time", 3},
                           {"batch_size", 4}, {"learning_rate", 1e-2}, {"seed", 5}, {"patience", 0}};

} // namespace

TEST_CASE("group names") {
    std::vector<std::string> names{"e", "PR"};
    CHECK(parse_groups(names) == std::set<declare::Group>{declare::Group::E, declare::Group::PR});
    std::vector<std::string> all{"all"};
    CHECK(parse_groups(all).size() == 4);
    std::vector<std::string> bad{"X"};
    CHECK_THROWS_AS(parse_groups(bad), ValidationError);
    CHECK_THROWS_AS(parse_groups(std::vector<std::string>{}), ValidationError);
}

TEST_CASE("address parsing") {
    auto a = parse_address("0.0.0.0:9000");
    CHECK(a.host == "0.0.0.0");
    CHECK(a.port == 9000);
    CHECK(parse_address("localhost").port == 8080);
    CHECK(parse_address(":81").host == "127.0.0.1");
    CHECK_THROWS_AS(parse_address("host:http"), ValidationError);
    CHECK_THROWS_AS(parse_address("host:70000"), ValidationError);
}

TEST_CASE("training request json round trip keeps every field") {
    TrainRequest r;
    r.train.learning_rate = 5e-3;
    r.train.batch_size = 16;
    r.train.reduction = condnet::Reduction::Sum;
    r.hidden = 256;
    r.d_emb = 64;
    r.split_ratio = 0.7;
    auto back = TrainRequest::from_json(r.to_json());
    CHECK(back.to_json() == r.to_json());
    CHECK(TrainRequest::from_json(json::object()).to_json() == TrainRequest{}.to_json());
    auto bad = r;
    bad.split_ratio = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("saved logs keep their provenance") {
    TempDir dir;
    auto log = training_log();
    log.provenance.length_cap = 4;
    log.provenance.steps = {"clean(min_len=3,q=0.9,P=4)"};
    save_log(log, dir.path / "log.jsonl");
    auto back = open_log(dir.path / "log.jsonl");
    REQUIRE(back.provenance.length_cap);
    CHECK(*back.provenance.length_cap == 4);
    CHECK(back.provenance.steps == log.provenance.steps);
    CHECK(back.traces.size() == log.traces.size());
    CHECK(back.traces[0].events[3].remaining_time == 0.0);
    CHECK(back.traces[0].events[0].remaining_time == log.traces[0].events[0].remaining_time);
}

TEST_CASE("workspace stores by name and refuses path escapes") {
    TempDir dir;
    Workspace ws(dir.path);
    ws.put("reports", "r1.json", "{}");
    CHECK(ws.get("reports", "r1.json") == "{}");
    CHECK(ws.contains("reports", "r1.json"));
    CHECK_FALSE(ws.contains("reports", "r2.json"));
    CHECK_THROWS_AS(ws.get("reports", "r2.json"), NotFound);
    CHECK_THROWS_AS(ws.file("reports", "../x"), ValidationError);
    CHECK_THROWS_AS(ws.put("reports", "a/b", "x"), ValidationError);
}

TEST_CASE("job states move forward and terminal records stay put") {
    TempDir dir;
    Workspace ws(dir.path);
    JobQueue q(ws, 2);

    std::vector<double> seen;
    auto r = q.submit("ok", JobKind::Simulate, [&](const ProgressFn& p) {
        p(0.5);
        return std::string("/reports/ok");
    });
    CHECK((r.status == JobStatus::Queued || r.status == JobStatus::Running || r.status == JobStatus::Done));
    auto done = q.wait("ok", std::chrono::seconds(10));
    REQUIRE(done);
    CHECK(done->status == JobStatus::Done);
    CHECK(done->result == "/reports/ok");
    CHECK(done->progress == 1.0);
    CHECK(done->to_json()["error"].is_null());

    // a second submission of the same id does not run again
    bool reran = false;
    auto again = q.submit("ok", JobKind::Simulate, [&](const ProgressFn&) {
        reran = true;
        return std::string("/reports/other");
    });
    CHECK(again.status == JobStatus::Done);
    CHECK(again.result == "/reports/ok");
    CHECK_FALSE(reran);

    q.submit("bad", JobKind::Train, [](const ProgressFn&) -> std::string { throw RuntimeFailure("diverged"); });
    auto failed = q.wait("bad", std::chrono::seconds(10));
    REQUIRE(failed);
    CHECK(failed->status == JobStatus::Failed);
    CHECK(failed->error == "diverged");
    CHECK(failed->to_json()["result"].is_null());

    // a failed job may be retried
    q.submit("bad", JobKind::Train, [](const ProgressFn&) { return std::string("/checkpoints/bad"); });
    auto retried = q.wait("bad", std::chrono::seconds(10));
    CHECK(retried->status == JobStatus::Done);
    CHECK(retried->attempt == 2);

    CHECK_FALSE(q.get("missing"));
}

TEST_CASE("jobs interrupted by a restart come back failed") {
    TempDir dir;
    Workspace ws(dir.path);
    JobRecord r{"j1", JobKind::Train, JobStatus::Running, 0.4, {}, {}, 1};
    ws.put("jobs", "j1.json", r.to_json().dump());
    JobRecord d{"j2", JobKind::Simulate, JobStatus::Done, 1.0, "/reports/j2", {}, 1};
    ws.put("jobs", "j2.json", d.to_json().dump());
    JobQueue q(ws, 1);
    CHECK(q.get("j1")->status == JobStatus::Failed);
    CHECK(q.get("j2")->status == JobStatus::Done);
    CHECK(JobRecord::from_json(json::parse(ws.get("jobs", "j1.json"))).status == JobStatus::Failed);
}

TEST_CASE("http service") {
    TempDir dir;
    Service service({dir.path / "ws", 2});
    int port = service.bind("127.0.0.1", 0);
    std::thread server([&] { service.run(); });
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);

    auto post = [&](const std::string& path, const json& body) {
        auto res = client.Post(path, body.dump(), "application/json");
        REQUIRE(res);
        return res;
    };
    auto get = [&](const std::string& path) {
        auto res = client.Get(path);
        REQUIRE(res);
        return res;
    };
    auto wait_job = [&](const std::string& id) {
        for (int i = 0; i < 600; ++i) {
            auto j = json::parse(get("/jobs/" + id)->body);
            if (j["status"] == "done" || j["status"] == "failed") return j;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        FAIL("job did not finish");
        return json();
    };

    // upload
    auto upload = client.Post("/logs?format=jsonl", eventlog::to_jsonl(training_log()), "application/x-ndjson");
    REQUIRE(upload);
    CHECK(upload->status == 201);
    auto log_id = json::parse(upload->body)["log_id"].get<std::string>();
    auto summary = json::parse(get("/logs/" + log_id + "/summary")->body);
    CHECK(summary["n_traces"] == 24);
    CHECK(summary["provenance"]["length_cap"] == 4);
    auto repeat = client.Post("/logs?format=jsonl", eventlog::to_jsonl(training_log()), "application/x-ndjson");
    CHECK(repeat->status == 200);
    CHECK(json::parse(repeat->body)["log_id"] == log_id);
    CHECK(get("/logs/nope/summary")->status == 404);
    CHECK(client.Post("/logs?format=xes", "<log><trace>", "application/xml")->status == 400);

    // discovery
    auto disc = post("/discover", {{"log_id", log_id}, {"groups", {"E"}}, {"min_support", 0.1}});
    REQUIRE(disc->status == 200);
    auto universe_id = json::parse(disc->body)["universe_id"].get<std::string>();
    auto universe = json::parse(get("/universes/" + universe_id)->body);
    CHECK(universe["size"] == 15);  // 3 unary templates x 5 activities
    auto other = post("/discover", {{"log_id", log_id}, {"groups", {"C"}}});
    auto other_id = json::parse(other->body)["universe_id"].get<std::string>();
    CHECK(other_id != universe_id);
    CHECK(post("/discover", {{"log_id", log_id}, {"groups", {"Q"}}})->status == 400);
    CHECK(post("/discover", {{"log_id", "nope"}})->status == 404);
    CHECK(get("/universes/nope")->status == 404);

    SUBCASE("consistency preflight") {
        auto contradiction = post("/consistency", {{"universe_id", universe_id},
                                                   {"vector", {{"Existence(a)", 1}, {"Absence(a)", 1}}}});
        REQUIRE(contradiction->status == 200);
        auto body = json::parse(contradiction->body);
        CHECK(body["consistent"] == false);
        REQUIRE(body["violations"].size() == 1);
        // the same violation declare reports, verbatim
        auto u = declare::ConstraintUniverse::from_json(universe["instances"]);
        declare::Assignment a(u.size(), -1);
        auto ke = *u.find("Existence(a)"), ka = *u.find("Absence(a)");
        a[ke] = 1;
        a[ka] = 1;
        std::vector<std::size_t> demanded{std::min(ke, ka), std::max(ke, ka)};
        CHECK(body["violations"][0] == declare::to_json(declare::check_consistency(u, a, demanded).at(0)));

        auto fine = post("/consistency", {{"universe_id", universe_id}, {"vector", {{"Existence(d)", 1}}}});
        CHECK(json::parse(fine->body)["consistent"] == true);

        auto real = declare::fulfillment_vector(u, cosmo::testing::letters("abce"));
        auto full = post("/consistency", {{"universe_id", universe_id}, {"vector", real.bits}});
        CHECK(json::parse(full->body)["consistent"] == true);
        auto dry = post("/consistency",
                        {{"universe_id", universe_id}, {"vector", real.bits}, {"edits", {"Existence(d)=1"}}});
        auto dry_body = json::parse(dry->body);
        CHECK(dry_body["consistent"] == true);
        CHECK(dry_body["phi_s"]["mask"].size() == 2);  // Existence(d) and the forced Absence(d)

        CHECK(post("/consistency", {{"universe_id", universe_id}, {"vector", {1, 0}}})->status == 400);
        CHECK(post("/consistency", {{"universe_id", universe_id}, {"vector", {{"Bogus(a)", 1}}}})->status == 400);
        CHECK(post("/consistency", {{"universe_id", "nope"}, {"vector", json::array()}})->status == 404);
    }

    SUBCASE("train and simulate") {
        auto train = post("/train", {{"log_id", log_id}, {"universe_id", universe_id}, {"config", kTrainConfig}});
        REQUIRE(train->status == 202);
        auto train_body = json::parse(train->body);
        auto checkpoint_id = train_body["checkpoint_id"].get<std::string>();
        auto job = wait_job(train_body["job_id"]);
        REQUIRE(job["status"] == "done");
        CHECK(job["result"] == "/checkpoints/" + checkpoint_id);
        CHECK(job["progress"] == 1.0);
        auto metrics = json::parse(get("/checkpoints/" + checkpoint_id)->body);
        CHECK(metrics["history"].size() == 60);
        CHECK(metrics["n_test"] == 5);  // 24 - floor(0.8 * 24)

        auto same = post("/train", {{"log_id", log_id}, {"universe_id", universe_id}, {"config", kTrainConfig}});
        CHECK(json::parse(same->body)["job_id"] == train_body["job_id"]);
        CHECK(post("/train", {{"log_id", log_id}, {"universe_id", universe_id}, {"config", {{"learning_rate", -1}}}})
                  ->status == 400);
        CHECK(post("/train", {{"log_id", "nope"}, {"universe_id", universe_id}})->status == 404);

        json request = {{"checkpoint_id", checkpoint_id},
                        {"universe_id", universe_id},
                        {"edits", {"Existence(d)=1"}},
                        {"n_traces", 40},
                        {"sampling", "multinomial"},
                        {"seed", 3}};

        auto mismatch = request;
        mismatch["universe_id"] = other_id;
        CHECK(post("/simulate", mismatch)->status == 409);

        auto inconsistent = request;
        inconsistent["edits"] = {"Existence(d)=1", "Absence(d)=1"};
        auto bad = post("/simulate", inconsistent);
        CHECK(bad->status == 400);
        CHECK(json::parse(bad->body)["violations"].size() == 1);

        auto unknown_edit = request;
        unknown_edit["edits"] = {"Existence(z)=1"};
        CHECK(post("/simulate", unknown_edit)->status == 400);
        auto missing = request;
        missing["checkpoint_id"] = "nope";
        CHECK(post("/simulate", missing)->status == 404);

        auto sim = post("/simulate", request);
        REQUIRE(sim->status == 202);
        auto sim_body = json::parse(sim->body);
        auto report_id = sim_body["report_id"].get<std::string>();
        auto sim_job = wait_job(sim_body["job_id"]);
        REQUIRE(sim_job["status"] == "done");
        CHECK(sim_job["result"] == "/reports/" + report_id);
        CHECK(json::parse(post("/simulate", request)->body)["job_id"] == sim_body["job_id"]);

        auto report_text = get("/reports/" + report_id)->body;
        auto report = json::parse(report_text);
        CHECK(report["n_traces"] == 40);
        CHECK(report["universe_fingerprint"] == universe_id);

        // the service adds nothing: the library call gives the same bytes
        auto ck = load_checkpoint(service.workspace(), checkpoint_id);
        auto config = simulator::SimulationConfig::from_json(request, ck.universe);
        CHECK(report_document(ck.universe, run_simulation(ck, config)) == report_text);

        // and so does the command line
        auto ck_path = service.workspace().file("checkpoints", checkpoint_id + ".ck");
        auto cli = run_cli("simulate --checkpoint '" + ck_path.string() +
                               "' --edit 'Existence(d)=1' --n 40 --seed 3 --output cli.json",
                           dir.path);
        CHECK(cli.code == 0);
        CHECK(slurp(dir.path / "cli.json") == report_text);

        auto dfg = json::parse(get("/reports/" + report_id + "/dfg?threshold=0.1")->body);
        CHECK(dfg["n_traces"] == 40);
        CHECK(dfg["threshold"] == 0.1);
        CHECK(dfg.contains("coverage_delta"));
        auto dot = get("/reports/" + report_id + "/dfg?format=dot");
        CHECK(dot->status == 200);
        CHECK(dot->body.starts_with("digraph"));
        CHECK(get("/reports/" + report_id + "/dfg?threshold=2")->status == 400);
        CHECK(get("/reports/nope")->status == 404);
    }

    CHECK(get("/jobs/nope")->status == 404);
    service.stop();
    server.join();
}

TEST_CASE("command line") {
    TempDir dir;
    auto log = training_log();
    eventlog::write_jsonl(log, dir.path / "raw.jsonl");

    SUBCASE("usage errors exit 1 with the usage text") {
        auto r = run_cli("train --log raw.jsonl --bogus", dir.path);
        CHECK(r.code == 1);
        CHECK(r.output.find("--bogus") != std::string::npos);
        CHECK(r.output.find("Usage") != std::string::npos);
        CHECK(run_cli("", dir.path).code == 1);
        CHECK(run_cli("simulate --checkpoint m.ck --edit 'Existence(a)=1' --n many", dir.path).code == 1);
        CHECK(run_cli("--help", dir.path).code == 0);
    }

    SUBCASE("data errors exit 2") {
        CHECK(run_cli("discover --log missing.jsonl", dir.path).code == 2);
        std::ofstream(dir.path / "broken.xes") << "<log><trace>";
        CHECK(run_cli("ingest --input broken.xes", dir.path).code == 2);
        CHECK(run_cli("discover --log raw.jsonl --groups Q", dir.path).code == 2);
    }

    SUBCASE("pipeline end to end") {
        auto ingest = run_cli("ingest --input raw.jsonl --output log.jsonl", dir.path);
        REQUIRE(ingest.code == 0);
        REQUIRE(run_cli("discover --log log.jsonl --groups E --output u.json", dir.path).code == 0);
        auto u = declare::ConstraintUniverse::from_json(json::parse(slurp(dir.path / "u.json")));
        CHECK(u.size() == 15);

        std::ofstream(dir.path / "train.json") << kTrainConfig.dump();
        // flags override the config file
        auto train = run_cli("train --config train.json --log log.jsonl --universe u.json --epochs 40 --output m.ck",
                             dir.path);
        REQUIRE(train.code == 0);
        auto metrics = json::parse(slurp(dir.path / "m.metrics.json"));
        CHECK(metrics["history"].size() == 40);
        CHECK(metrics["request"]["hidden"] == 16);
        CHECK(std::filesystem::exists(dir.path / "m.test.jsonl"));

        auto sim = run_cli("simulate --checkpoint m.ck --edit 'Existence(d)=1' --n 300 --seed 7 --jsonl sim.jsonl",
                           dir.path);
        REQUIRE(sim.code == 0);
        auto report = json::parse(slurp(dir.path / "report.json"));
        CHECK(report["n_traces"] == 300);
        CHECK(report["traces"].size() == 300);
        CHECK(report["config"]["seed"] == 7);
        std::ifstream jsonl(dir.path / "sim.jsonl");
        CHECK(eventlog::parse_jsonl(jsonl, "sim").traces.size() == 300);

        auto again = run_cli("simulate --checkpoint m.ck --edit 'Existence(d)=1' --n 300 --seed 7 --output again.json",
                             dir.path);
        CHECK(again.code == 0);
        CHECK(slurp(dir.path / "again.json") == slurp(dir.path / "report.json"));

        auto contradictory =
            run_cli("simulate --checkpoint m.ck --edit 'Existence(d)=1' --edit 'Absence(d)=1'", dir.path);
        CHECK(contradictory.code == 2);
        CHECK(contradictory.output.find("Existence(d)=1 and Absence(d)=1") != std::string::npos);

        REQUIRE(run_cli("discover --log log.jsonl --groups C --output c.json", dir.path).code == 0);
        CHECK(run_cli("simulate --checkpoint m.ck --universe c.json --edit 'Existence(d)=1'", dir.path).code == 2);

        auto rep = run_cli("report --report report.json --original m.test.jsonl --threshold 0.05 --output-dir out",
                           dir.path);
        REQUIRE(rep.code == 0);
        for (const char* f : {"dfg.dot", "dfg.json", "satisfaction.csv", "coverage.csv"})
            CHECK(std::filesystem::exists(dir.path / "out" / f));
        CHECK(slurp(dir.path / "out" / "satisfaction.csv").starts_with("scope,name,imposed,rate\noverall,all,,"));
    }

    SUBCASE("paper grid values on the command line") {
        std::ofstream(dir.path / "short.json") << json{{"epochs", 2}}.dump();
        auto r = run_cli("train --config short.json --log raw.jsonl --lr 0.005 --batch 32 --hidden 256 --layers 1",
                         dir.path);
        REQUIRE(r.code == 0);
        auto metrics = json::parse(slurp(dir.path / "model.metrics.json"));
        CHECK(metrics["request"]["learning_rate"] == 0.005);
        CHECK(metrics["request"]["batch_size"] == 32);
        CHECK(metrics["shape"]["hidden"] == 256);
        CHECK(std::filesystem::exists(dir.path / "model.ck"));
    }
}
