#include "cosmo/artifacts/tables.hpp"

#include <cstdio>

namespace cosmo::artifacts {

namespace {

std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::string coverage_csv(std::span<const CoverageRow> rows) {
    std::string out = "activity,original_coverage,simulated_coverage,delta\n";
    for (const auto& r : rows)
        out += field(r.activity) + "," + number(r.original) + "," + number(r.simulated) + "," + number(r.delta) + "\n";
    return out;
}

std::string satisfaction_csv(const declare::ConformanceReport& r) {
    std::string out = "scope,name,imposed,rate\n";
    out += "overall,all,," + number(r.overall_rate) + "\n";
    for (const auto& [g, rate] : r.per_group) out += "group," + std::string(declare::name(g)) + ",," + number(rate) + "\n";
    for (const auto& c : r.per_constraint)
        out += "constraint," + field(c.constraint) + "," + std::to_string(c.imposed) + "," + number(c.rate) + "\n";
    return out;
}

} // namespace cosmo::artifacts
