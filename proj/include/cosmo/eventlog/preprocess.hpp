#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "cosmo/eventlog/event_log.hpp"

namespace cosmo::eventlog {

struct CleanOptions {
    std::size_t min_len = 3;
    double max_len_percentile = 0.90;
};

// Length cap P: the element at 0-based index min(ceil(q*n), n-1) of the
// ascending trace lengths.
std::size_t length_quantile(std::vector<std::size_t> lengths, double q);

// Keeps traces with min_len <= length <= P, P computed once on the input.
// Throws DataError on empty input or when every trace is filtered out.
EventLog clean(const EventLog& log, const CleanOptions& options = {});

// Fills execution_time / remaining_time (seconds) on every event.
EventLog derive_times(EventLog log);

enum class SplitMode { RatioByCase, ExternalFile };

struct SplitSpec {
    SplitMode mode = SplitMode::RatioByCase;
    double ratio = 0.8;
    std::uint64_t seed = 42;
    std::optional<std::filesystem::path> external_path;
};

struct SplitResult {
    EventLog train;
    EventLog test;
};

// Ratio mode: seeded shuffle of case ids, first floor(ratio*n) go to train.
// External mode: JSON file {"train":[case ids], "test":[case ids]}.
SplitResult split(const EventLog& log, const SplitSpec& spec);

} // namespace cosmo::eventlog
