#include <doctest.h>

#include "cosmo/artifacts/tables.hpp"
#include "cosmo/error.hpp"
#include "support/fixtures.hpp"

using namespace cosmo;
using namespace cosmo::artifacts;
using cosmo::testing::letters;

namespace {

std::vector<std::vector<std::string>> seqs(std::initializer_list<const char*> xs) {
    std::vector<std::vector<std::string>> out;
    for (const char* x : xs) out.push_back(letters(x));
    return out;
}

std::size_t edges_in(const std::string& dot) {
    std::size_t n = 0;
    for (auto p = dot.find("->"); p != std::string::npos; p = dot.find("->", p + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("build_dfg counts and coverage") {
    auto g = build_dfg(seqs({"AB", "AB"}));
    CHECK(g.edges.at({"A", "B"}) == 2);
    CHECK(g.coverage.at("A") == 1.0);
    CHECK(g.coverage.at("B") == 1.0);
    CHECK(build_dfg(seqs({"AB", "AC"})).coverage.at("B") == 0.5);
    CHECK_THROWS_AS(build_dfg(std::vector<std::vector<std::string>>{}), DataError);
}

TEST_CASE("start and end pseudo-nodes balance the trace count") {
    auto traces = seqs({"ABC", "A", "BB", "CAB", "ABAB"});
    auto g = build_dfg(traces);
    std::size_t out_of_start = 0, into_end = 0;
    for (const auto& [e, n] : g.edges) {
        if (e.first == kStart) out_of_start += n;
        if (e.second == kEnd) into_end += n;
    }
    CHECK(out_of_start == traces.size());
    CHECK(into_end == traces.size());
    CHECK(g.edges.at({"B", "B"}) == 1);
}

TEST_CASE("coverage_delta") {
    auto orig = build_dfg(seqs({"AL", "AL", "AL", "AL", "A"}));  // L at 0.8
    auto same = coverage_delta(orig, orig);
    for (const auto& r : same) CHECK(r.delta == 0.0);

    auto sim = build_dfg(seqs({"A", "A", "A"}));
    auto rows = coverage_delta(orig, sim);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].activity == "L");
    CHECK(rows[1].delta == doctest::Approx(-0.8));

    DirectlyFollowsGraph a, b;
    a.coverage["L"] = 0.8;
    b.coverage["L"] = 0.21;
    CHECK(coverage_delta(a, b)[0].delta == doctest::Approx(-0.59));
}

TEST_CASE("export_dot thresholds and stability") {
    auto g = build_dfg(seqs({"AB", "AB", "AB", "AC"}));
    auto all = export_dot(g, 0.0);
    CHECK(edges_in(all) == g.edges.size());
    auto top = export_dot(g, 1.0);
    std::size_t max = 0, at_max = 0;
    for (const auto& [e, n] : g.edges) max = std::max(max, n);
    for (const auto& [e, n] : g.edges) at_max += n == max;
    CHECK(edges_in(top) == at_max);
    CHECK(export_dot(g, 0.1) == export_dot(g, 0.1));
    CHECK(all.find("\"A\" -> \"B\" [label=\"3\"]") != std::string::npos);
    CHECK_THROWS_AS(export_dot(g, 1.5), ValidationError);
    auto j = to_json(g, 1.0);
    CHECK(j["edges"].size() == at_max);
}

TEST_CASE("dot escapes quotes in labels") {
    std::vector<std::vector<std::string>> t{{"say \"hi\"", "x\\y"}};
    auto dot = export_dot(build_dfg(t));
    CHECK(dot.find("\"say \\\"hi\\\"\"") != std::string::npos);
}

TEST_CASE("CSV tables") {
    std::vector<CoverageRow> rows{{"Lactic, Acid", 0.8, 0.21, -0.59}};
    auto csv = coverage_csv(rows);
    CHECK(csv == "activity,original_coverage,simulated_coverage,delta\n\"Lactic, Acid\",0.800000,0.210000,-0.590000\n");
    declare::ConformanceReport r;
    r.overall_rate = 0.5;
    r.per_group[declare::Group::E] = 0.5;
    r.per_constraint.push_back({0, "Existence(A)", 1, 0.5});
    CHECK(satisfaction_csv(r) ==
          "scope,name,imposed,rate\noverall,all,,0.500000\ngroup,E,,0.500000\nconstraint,Existence(A),1,0.500000\n");
}
