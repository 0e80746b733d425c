#include <doctest.h>

#include "cosmo/error.hpp"
#include "cosmo/simulator/simulate.hpp"
#include "support/fixtures.hpp"

using namespace cosmo;
using namespace cosmo::simulator;
using cosmo::declare::Template;
using cosmo::testing::letter_log;
using cosmo::testing::trained_checkpoint;

namespace {

declare::ConstraintUniverse e_universe() {
    return declare::ConstraintUniverse({{Template::Existence, "A", std::nullopt},
                                        {Template::Absence, "A", std::nullopt},
                                        {Template::Exactly1, "A", std::nullopt}});
}

const condnet::Checkpoint& abc_checkpoint() {
    static const auto ck = [] {
        declare::ConstraintUniverse u({{Template::Existence, "B", std::nullopt},
                                       {Template::Absence, "B", std::nullopt},
                                       {Template::Response, "Z", std::string("B")},
                                       {Template::Existence, "Z", std::nullopt}});
        return trained_checkpoint(letter_log({"ABC"}), u);
    }();
    return ck;
}

} // namespace

TEST_CASE("parse_edit") {
    auto u = e_universe();
    auto e = parse_edit(u, "Existence(A)=1");
    CHECK(e.coordinate == *u.find("Existence(A)"));
    CHECK(e.value);
    CHECK(format_edit(u, e) == "Existence(A)=1");
    CHECK_FALSE(parse_edit(u, " Absence( A ) = 0 ").value);
    CHECK_THROWS_AS(parse_edit(u, "Existence(B)=1"), ValidationError);
    CHECK_THROWS_AS(parse_edit(u, "Existence(A)=2"), ValidationError);
    CHECK_THROWS_AS(parse_edit(u, "Existence(A)"), ValidationError);
}

TEST_CASE("build_phi_s sets Absence opposite to an edited Existence") {
    auto u = e_universe();
    auto kex = *u.find("Existence(A)");
    auto kab = *u.find("Absence(A)");
    std::vector<std::uint8_t> bits(u.size(), 0);
    bits[kab] = 1;  // trace without A
    std::vector<ConditionEdit> edits{{kex, true}};
    auto p = build_phi_s(u, u.make_vector(bits), edits);
    CHECK(p.vector.bits[kex] == 1);
    CHECK(p.vector.bits[kab] == 0);
    CHECK(p.mask == std::vector<std::size_t>{std::min(kex, kab), std::max(kex, kab)});
    REQUIRE(p.adjustments.size() == 1);
    CHECK(p.adjustments[0].coordinate == kab);
    CHECK(p.adjustments[0].previous);
    CHECK(p.adjustments[0].cause == kex);
}

TEST_CASE("build_phi_s rejections") {
    auto u = e_universe();
    auto base = u.make_vector({1, 0, 0});
    CHECK_THROWS_AS(build_phi_s(u, base, std::vector<ConditionEdit>{}), ValidationError);

    // explicit edits are never overridden by companions
    std::vector<ConditionEdit> both{{*u.find("Existence(A)"), true}, {*u.find("Absence(A)"), true}};
    CHECK_THROWS_AS(build_phi_s(u, base, both), InconsistentConditions);
    std::vector<ConditionEdit> twice{{0, true}, {0, false}};
    CHECK_THROWS_AS(build_phi_s(u, base, twice), ValidationError);

    declare::ConstraintUniverse pr({{Template::ChainResponse, "A", std::string("B")},
                                    {Template::NotChainSuccession, "A", std::string("B")},
                                    {Template::Existence, "A", std::nullopt}});
    std::vector<ConditionEdit> clash{{*pr.find("ChainResponse(A, B)"), true}, {*pr.find("NotChainSuccession(A, B)"), true}};
    try {
        build_phi_s(pr, pr.make_vector({1, 0, 1}), clash);
        FAIL("expected InconsistentConditions");
    } catch (const InconsistentConditions& e) {
        CHECK_FALSE(e.violations().empty());
        CHECK_FALSE(e.details().empty());
    }
}

TEST_CASE("chain response edits imply the weaker responses") {
    declare::ConstraintUniverse u({{Template::ChainResponse, "A", std::string("B")},
                                   {Template::AlternateResponse, "A", std::string("B")},
                                   {Template::Response, "A", std::string("B")},
                                   {Template::Existence, "A", std::nullopt}});
    auto kc = *u.find("ChainResponse(A, B)");
    std::vector<ConditionEdit> edits{{kc, true}};
    auto p = build_phi_s(u, u.make_vector({0, 0, 0, 1}), edits);
    CHECK(p.vector.bits[*u.find("AlternateResponse(A, B)")] == 1);
    CHECK(p.vector.bits[*u.find("Response(A, B)")] == 1);
    CHECK(p.mask.size() == 3);

    std::vector<ConditionEdit> deny{{*u.find("Response(A, B)"), false}};
    auto q = build_phi_s(u, u.make_vector({1, 1, 1, 1}), deny);
    CHECK(q.vector.bits[kc] == 0);
}

TEST_CASE("sampling never draws PAD or BOS") {
    Eigen::VectorXd logits(5);
    logits << 50.0, 50.0, 0.0, 0.0, 1.0;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        int t = sample_token(logits, Sampling::Multinomial, 1.0, rng);
        CHECK(t >= condnet::Vocabulary::EOS);
    }
    CHECK(sample_token(logits, Sampling::Argmax, 1.0, rng) == 4);
}

TEST_CASE("memorized net regenerates its trace") {
    const auto& ck = abc_checkpoint();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c[*ck.universe.find("Existence(B)")] = 1.0;
    std::mt19937_64 rng(1);
    auto g = generate_trace(ck.net, c, "A", {Sampling::Argmax, 1.0, 10}, rng);
    CHECK(g.activities == testing::letters("ABC"));
    CHECK_FALSE(g.truncated);
    CHECK(g.execution_times[0] == 0.0);
    for (double r : g.remaining_times) CHECK(r >= 0.0);

    std::mt19937_64 a(9), b(9);
    auto cold = generate_trace(ck.net, c, "A", {Sampling::Multinomial, 1e-6, 10}, a);
    auto arg = generate_trace(ck.net, c, "A", {Sampling::Argmax, 1.0, 10}, b);
    CHECK(cold.activities == arg.activities);

    auto one = generate_trace(ck.net, c, "A", {Sampling::Multinomial, 1.0, 1}, rng);
    CHECK(one.activities.size() == 1);
    CHECK(one.truncated);

    auto unknown = generate_trace(ck.net, c, "Q", {Sampling::Argmax, 1.0, 4}, rng);
    CHECK(unknown.unknown_seed == 1);
}

TEST_CASE("simulate: size, vacuity, determinism across thread counts") {
    const auto& ck = abc_checkpoint();
    const auto& u = ck.universe;
    SimulationConfig cfg;
    cfg.n_traces = 300;
    cfg.seed = 7;
    cfg.base_mode = BaseMode::Explicit;
    cfg.base_vector = std::vector<std::uint8_t>(u.size(), 0);
    cfg.base_vector[*u.find("Existence(B)")] = 1;
    cfg.base_vector[*u.find("Existence(Z)")] = 1;
    cfg.edits = {{*u.find("Response(Z, B)"), true}};
    cfg.threads = 1;
    auto r1 = simulate(ck, cfg);
    CHECK(r1.traces.size() == 300);
    CHECK(r1.conformance.overall_rate == 1.0);  // Z never occurs: vacuously satisfied
    for (const auto& t : r1.traces) CHECK(t.generated.activities.size() <= ck.length_cap);
    cfg.threads = 4;
    auto r2 = simulate(ck, cfg);
    CHECK(to_json(u, r1).dump() == to_json(u, r2).dump());
    cfg.seed = 8;
    CHECK(simulate(ck, cfg).config["seed"] == 8);

    auto lines = to_jsonl(r1);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 300);
}

TEST_CASE("simulate: prefix satisfaction counts prefixes directly") {
    const auto& ck = abc_checkpoint();
    const auto& u = ck.universe;
    SimulationConfig cfg;
    cfg.n_traces = 200;
    cfg.seed = 3;
    cfg.temperature = 3.0;  // spread the samples so prefixes differ
    cfg.base_mode = BaseMode::Explicit;
    cfg.base_vector = std::vector<std::uint8_t>(u.size(), 0);
    cfg.base_vector[*u.find("Absence(B)")] = 1;
    cfg.base_vector[*u.find("Response(Z, B)")] = 1;
    cfg.edits = {{*u.find("Existence(B)"), true}};
    cfg.seed_activity = "A";
    CHECK(simulate(ck, cfg).prefix_satisfaction.empty());
    cfg.prefix_rates = true;
    auto r = simulate(ck, cfg);
    CHECK(to_json(u, r).contains("prefix_satisfaction"));

    // mask: Existence(B)=1 and Absence(B)=0, both met exactly when B is in the prefix
    REQUIRE(r.mask.size() == 2);
    std::vector<double> expected;
    for (std::size_t t = 1;; ++t) {
        std::size_t seen = 0, hits = 0;
        for (const auto& tr : r.traces) {
            const auto& a = tr.generated.activities;
            if (a.size() < t) continue;
            ++seen;
            hits += std::find(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(t), "B") != a.begin() + static_cast<std::ptrdiff_t>(t);
        }
        if (seen == 0) break;
        expected.push_back(static_cast<double>(hits) / static_cast<double>(seen));
    }
    CHECK(r.prefix_satisfaction == expected);
    CHECK(r.prefix_satisfaction.front() == 0.0);  // every trace starts with A
}

TEST_CASE("simulate: sampled bases must flip the edited coordinates") {
    const auto& ck = abc_checkpoint();
    const auto& u = ck.universe;
    SimulationConfig cfg;
    cfg.n_traces = 5;
    cfg.edits = {{*u.find("Existence(B)"), true}};  // every pool case already has B
    CHECK_THROWS_AS(simulate(ck, cfg), ValidationError);
    cfg.edits = {{*u.find("Existence(B)"), false}};
    auto r = simulate(ck, cfg);
    CHECK(r.bases.size() == 1);
    CHECK(r.bases[0].case_id == "c0");
    CHECK(r.mask.size() == 2);

    cfg.base_mode = BaseMode::Case;
    cfg.base_case = "nope";
    CHECK_THROWS_AS(simulate(ck, cfg), DataError);
}

TEST_CASE("simulation config JSON") {
    auto u = e_universe();
    auto c = SimulationConfig::from_json({{"edits", {"Existence(A)=1"}}, {"n_traces", 10}, {"sampling", "argmax"}}, u);
    CHECK(c.edits.size() == 1);
    CHECK(c.sampling == Sampling::Argmax);
    CHECK(c.base_mode == BaseMode::Sampled);
    CHECK(c.to_json(u)["edits"][0] == "Existence(A)=1");
    CHECK_THROWS_AS(SimulationConfig::from_json({{"sampling", "beam"}}, u), ValidationError);
}
