#include <doctest.h>

#include <random>

#include "cosmo/declare/conformance.hpp"
#include "cosmo/declare/consistency.hpp"
#include "cosmo/declare/evaluate.hpp"
#include "cosmo/declare/monitor.hpp"
#include "cosmo/declare/universe.hpp"
#include "cosmo/error.hpp"
#include "support/ltlf_oracle.hpp"

using namespace cosmo;
using namespace cosmo::declare;
using cosmo::eventlog::make_log;
using cosmo::eventlog::Trace;

namespace {

std::vector<int> ids(const std::string& s) {
    std::vector<int> out;
    for (char c : s) out.push_back(c - 'a');
    return out;
}

bool eval(Template t, const std::string& trace) {
    return evaluate(t, 0, 1, ids(trace));  // a = 0, b = 1, c = 2
}

bool run_monitor(Template t, int a, int b, const std::vector<int>& trace) {
    MonitorState s = 0;
    for (int x : trace) s = monitor_step(t, s, a, b, x);
    return monitor_accepts(t, s);
}

eventlog::EventLog log_of(const std::vector<std::string>& traces) {
    std::vector<Trace> out;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        Trace t{"c" + std::to_string(i), {}};
        for (std::size_t j = 0; j < traces[i].size(); ++j)
            t.events.push_back({std::string(1, traces[i][j]), static_cast<TimestampMs>(j)});
        out.push_back(t);
    }
    return make_log(out);
}

std::vector<std::string> labels(const std::string& s) {
    std::vector<std::string> out;
    for (char c : s) out.emplace_back(1, c);
    return out;
}

} // namespace

TEST_CASE("template taxonomy") {
    CHECK(group(Template::Exactly1) == Group::E);
    CHECK(group(Template::ExclusiveChoice) == Group::C);
    CHECK(group(Template::AlternateResponse) == Group::PR);
    CHECK(group(Template::NotChainSuccession) == Group::NR);
    CHECK(arity(Template::Absence) == 1);
    CHECK(arity(Template::Precedence) == 2);
    CHECK(parse_template("chain response") == Template::ChainResponse);
    CHECK(parse_template("Exactly") == Template::Exactly1);
    CHECK_FALSE(parse_template("Succession"));
}

TEST_CASE("evaluate: named examples") {
    CHECK(eval(Template::ExclusiveChoice, "aca"));
    CHECK_FALSE(eval(Template::ExclusiveChoice, "ab"));
    CHECK_FALSE(eval(Template::ExclusiveChoice, "c"));
    CHECK(eval(Template::ChainResponse, "abab"));
    CHECK_FALSE(eval(Template::ChainResponse, "acb"));
    CHECK(eval(Template::Response, "b"));
    CHECK_FALSE(eval(Template::Precedence, "ba"));
    CHECK_FALSE(eval(Template::AlternateResponse, "aab"));
    CHECK(eval(Template::AlternateResponse, "abab"));
    CHECK_FALSE(eval(Template::NotSuccession, "acb"));
    CHECK(eval(Template::NotChainSuccession, "acb"));
}

TEST_CASE("evaluate and monitors agree with the brute-force oracle on all traces up to length 6") {
    auto traces = cosmo::testing::enumerate_traces(3, 6);
    REQUIRE(traces.size() == 1092);
    for (auto t : kAllTemplates) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                if (arity(t) == 2 && a == b) continue;
                if (arity(t) == 1 && b != 0) continue;
                int mismatches = 0;
                for (const auto& tr : traces) {
                    bool expected = cosmo::testing::oracle_eval(std::string(name(t)), a, b, tr);
                    mismatches += evaluate(t, a, b, tr) != expected;
                    mismatches += run_monitor(t, a, b, tr) != expected;
                }
                CHECK_MESSAGE(mismatches == 0, name(t), " a=", a, " b=", b);
            }
    }
}

TEST_CASE("universe grounding and ordering") {
    auto log = log_of({"ab", "ba"});
    auto u = instantiate_universe(log, {Group::E}, 0.0);
    REQUIRE(u.size() == 6);
    CHECK(u[0].display() == "Absence(a)");
    CHECK(u[2].display() == "Exactly1(a)");
    CHECK(u[5].display() == "Existence(b)");

    auto three = log_of({"abc"});
    auto uc = instantiate_universe(three, {Group::C}, 0.0);
    CHECK(uc.size() == 6);  // 3 unordered pairs x {Choice, ExclusiveChoice}

    auto apart = log_of({"acd", "bcd"});
    auto upr = instantiate_universe(apart, {Group::PR}, 1.0);
    CHECK_FALSE(upr.find(Template::Response, "a", "b"));
    auto upr0 = instantiate_universe(apart, {Group::PR}, 0.0);
    CHECK(upr0.find(Template::Response, "a", "b"));

    CHECK_THROWS_WITH_AS(instantiate_universe(log_of({"ac", "bc"}), {Group::NR}, 1.0), doctest::Contains("min-support"), DataError);
}

TEST_CASE("universe lookup by display text and JSON round trip") {
    ConstraintUniverse u({{Template::ChainResponse, "ER Sepsis Triage", std::string("CRP")},
                          {Template::Existence, "IV Antibiotics", std::nullopt},
                          {Template::Choice, "a, b", std::string("c")}});
    CHECK(u.find("ChainResponse(ER Sepsis Triage, CRP)"));
    CHECK(u.find("chain response( ER Sepsis Triage ,CRP )"));
    CHECK(u.find("Existence(IV Antibiotics)"));
    CHECK(u.find("Choice(a, b, c)"));
    CHECK(u.find("Choice(c, a, b)"));  // symmetric lookup
    CHECK_FALSE(u.find("Existence(CRP)"));
    auto back = ConstraintUniverse::from_json(u.to_json());
    CHECK(back.fingerprint() == u.fingerprint());
    CHECK(u.to_json()[0].contains("template"));

    CHECK_THROWS_AS(ConstraintUniverse({{Template::Response, "a", std::string("a")}}), ValidationError);
    CHECK_THROWS_AS(ConstraintUniverse({{Template::Existence, "a", std::nullopt}, {Template::Existence, "a", std::nullopt}}),
                    ValidationError);
}

TEST_CASE("fulfillment_vector") {
    ConstraintUniverse pair({{Template::Existence, "A", std::nullopt}, {Template::Absence, "A", std::nullopt}});
    // canonical order puts Absence first
    CHECK(fulfillment_vector(pair, labels("AB")).bits == std::vector<std::uint8_t>{0, 1});
    CHECK(fulfillment_vector(pair, labels("B")).bits == std::vector<std::uint8_t>{1, 0});

    auto u = instantiate_universe(log_of({"AB"}), {Group::E}, 0.0);
    // Absence(A) Absence(B) Exactly1(A) Exactly1(B) Existence(A) Existence(B) on [A,A,B]
    CHECK(fulfillment_vector(u, labels("AAB")).bits == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("augment pairs each trace with its vector") {
    auto log = log_of({"AB", "B"});
    ConstraintUniverse u({{Template::Existence, "A", std::nullopt}});
    auto aug = augment(log, u);
    REQUIRE(aug.size() == 2);
    CHECK(aug[0].phi.bits == std::vector<std::uint8_t>{1});
    CHECK(aug[1].phi.bits == std::vector<std::uint8_t>{0});
    CHECK(augment(eventlog::EventLog{}, u).empty());
    CHECK_THROWS_AS(augment(log, ConstraintUniverse{}), ValidationError);
}

TEST_CASE("check_consistency: named examples") {
    auto u = instantiate_universe(log_of({"A"}), {Group::E}, 0.0);  // Absence, Exactly1, Existence
    auto both = check_consistency(u, u.make_vector({1, 0, 1}));
    REQUIRE(both.size() == 1);
    CHECK(both[0].coordinates.size() == 2);
    CHECK(both[0].message.find("Existence(A)") != std::string::npos);
    CHECK(both[0].message.find("Absence(A)") != std::string::npos);
    CHECK(check_consistency(u, u.make_vector({0, 0, 1})).empty());

    ConstraintUniverse ex({{Template::Existence, "A", std::nullopt}, {Template::Exactly1, "A", std::nullopt}});
    // order: Exactly1(A), Existence(A)
    CHECK(check_consistency(ex, ex.make_vector({1, 0})).size() == 1);
}

TEST_CASE("Exactly1 implies Existence by enumeration over count(a) in {0,1,2}") {
    for (const char* t : {"", "a", "aa"}) {
        auto tr = ids(t);
        if (evaluate(Template::Exactly1, 0, 1, tr)) CHECK(evaluate(Template::Existence, 0, 1, tr));
    }
}

TEST_CASE("positive vs negative relation demands are flagged only when demanded") {
    ConstraintUniverse u({{Template::ChainResponse, "A", std::string("B")},
                          {Template::NotChainSuccession, "A", std::string("B")}});
    Assignment both{1, 1};
    std::vector<std::size_t> demanded{0, 1};
    auto v = check_consistency(u, both, demanded);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "positive-vs-negative-relation");
    // a trace without A fulfils both vacuously; as a plain vector it is fine
    CHECK(check_consistency(u, u.make_vector({1, 1})).empty());
}

TEST_CASE("vectors from real traces are never flagged") {
    auto traces = cosmo::testing::enumerate_traces(3, 5);
    auto u = instantiate_universe(log_of({"abc"}), {Group::E, Group::C, Group::PR, Group::NR}, 0.0);
    for (const auto& t : traces) {
        std::string s;
        for (int x : t) s.push_back(static_cast<char>('a' + x));
        auto v = fulfillment_vector(u, labels(s));
        auto flagged = check_consistency(u, v);
        CHECK_MESSAGE(flagged.empty(), s);
    }
}

TEST_CASE("satisfiable: witnesses and refutations") {
    auto u = instantiate_universe(log_of({"abc"}), {Group::E, Group::C, Group::PR, Group::NR}, 0.0);
    auto k = [&](const char* text) { return *u.find(text); };
    std::vector<Literal> contra{{k("Existence(a)"), true}, {k("Absence(a)"), true}};
    CHECK(satisfiable(u, contra).status == Satisfiability::Unsatisfiable);

    std::vector<Literal> chain{{k("ChainResponse(a, b)"), true}, {k("Existence(a)"), true}, {k("Exactly1(b)"), true}};
    auto r = satisfiable(u, chain);
    REQUIRE(r.status == Satisfiability::Satisfiable);
    CHECK(r.witness == std::vector<std::string>{"a", "b"});

    std::vector<Literal> excl{{k("ExclusiveChoice(a, b)"), true}, {k("Existence(a)"), false}, {k("Existence(b)"), false}};
    CHECK(satisfiable(u, excl).status == Satisfiability::Unsatisfiable);
    std::vector<std::size_t> demanded{excl[0].coordinate, excl[1].coordinate, excl[2].coordinate};
    Assignment asg(u.size(), -1);
    asg[excl[0].coordinate] = 1;
    asg[excl[1].coordinate] = 0;
    asg[excl[2].coordinate] = 0;
    CHECK_FALSE(check_consistency(u, asg, demanded).empty());
}

TEST_CASE("satisfiable agrees with bounded enumeration on random literal sets") {
    auto u = instantiate_universe(log_of({"abc"}), {Group::E, Group::C, Group::PR, Group::NR}, 0.0);
    auto traces = cosmo::testing::enumerate_traces(3, 6);
    std::vector<std::vector<std::uint8_t>> vectors;
    for (const auto& t : traces) {
        std::vector<std::string> s;
        for (int x : t) s.push_back(u.activities()[static_cast<std::size_t>(x)]);
        vectors.push_back(fulfillment_vector(u, s).bits);
    }
    std::mt19937_64 rng(5);
    int unsat = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Literal> lits;
        auto n = 1 + rng() % 4;
        for (std::size_t i = 0; i < n; ++i) lits.push_back({rng() % u.size(), (rng() & 1) == 1});
        bool witnessed = false;
        for (const auto& v : vectors) {
            bool ok = true;
            for (const auto& l : lits) ok = ok && (v[l.coordinate] == 1) == l.value;
            if (ok) {
                witnessed = true;
                break;
            }
        }
        auto r = satisfiable(u, lits);
        CHECK(r.status == (witnessed ? Satisfiability::Satisfiable : Satisfiability::Unsatisfiable));
        if (r.status == Satisfiability::Satisfiable) {
            auto v = fulfillment_vector(u, r.witness);
            for (const auto& l : lits) CHECK((v.bits[l.coordinate] == 1) == l.value);
        }
        unsat += !witnessed;
    }
    CHECK(unsat > 10);
}

TEST_CASE("conformance_report") {
    ConstraintUniverse u({{Template::Existence, "A", std::nullopt},
                          {Template::ChainResponse, "A", std::string("B")}});
    auto kex = *u.find("Existence(A)");
    auto kcr = *u.find("ChainResponse(A, B)");

    std::vector<std::vector<std::string>> all_a(300, labels("CAB"));
    std::vector<std::uint8_t> bits(u.size(), 0);
    bits[kex] = 1;
    std::vector<std::size_t> mask{kex};
    auto r = conformance_report(u, all_a, u.make_vector(bits), mask);
    CHECK(r.overall_rate == 1.0);
    CHECK(r.per_group.at(Group::E) == 1.0);

    // ChainResponse forbidden, but [A,B] fulfils it -> not satisfied
    std::vector<std::size_t> crmask{kcr};
    auto forbidden = conformance_report(u, std::vector<std::vector<std::string>>{labels("AB")},
                                        u.make_vector(std::vector<std::uint8_t>(u.size(), 0)), crmask);
    CHECK(forbidden.overall_rate == 0.0);
    CHECK(forbidden.per_trace[0].violated == std::vector<std::size_t>{kcr});

    std::vector<std::vector<std::string>> mixed{labels("A"), labels("B"), labels("AC"), labels("C")};
    auto half = conformance_report(u, mixed, u.make_vector(bits), mask);
    CHECK(half.overall_rate == 0.5);
    auto j = to_json(half);
    CHECK(j["overall_rate"] == 0.5);
    CHECK(j["per_group"]["E"] == 0.5);
    CHECK(j["per_trace"].size() == 4);

    CHECK_THROWS_AS(conformance_report(u, std::vector<std::vector<std::string>>{}, u.make_vector(bits), mask),
                    DataError);
}
