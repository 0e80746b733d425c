#pragma once

#include <span>
#include <string>

#include "cosmo/artifacts/dfg.hpp"
#include "cosmo/declare/conformance.hpp"

namespace cosmo::artifacts {

// activity,original_coverage,simulated_coverage,delta
std::string coverage_csv(std::span<const CoverageRow> rows);

// scope,name,imposed,rate with one "overall" row, one row per group and one
// per graded constraint.
std::string satisfaction_csv(const declare::ConformanceReport& r);

} // namespace cosmo::artifacts
