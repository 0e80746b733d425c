#pragma once

// Ground-truth process over A..F plus X, Y. Every trace starts with A and
// ends with F, with two to four of B..E in between. Half the traces contain
// X (once, or twice with probability 0.3). Among those, half are "chained":
// every X is immediately followed by Y. In the others X is followed by
// something else and Y may still appear later. Traces without X contain Y
// with probability 0.3.

#include <random>
#include <string>
#include <vector>

#include "cosmo/eventlog/preprocess.hpp"

namespace cosmo::testing {

struct SyntheticTrace {
    std::vector<std::string> activities;
    bool has_x = false;
    bool chained = false;
};

inline SyntheticTrace synthetic_trace(std::mt19937_64& rng) {
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    const std::vector<std::string> middle{"B", "C", "D", "E"};

    SyntheticTrace t;
    std::vector<std::string> body;
    std::size_t n_mid = 2 + pick(3);
    for (std::size_t i = 0; i < n_mid; ++i) body.push_back(middle[pick(middle.size())]);

    t.has_x = coin(0.5);
    if (t.has_x) {
        t.chained = coin(0.5);
        std::size_t n_x = coin(0.3) ? 2 : 1;
        for (std::size_t i = 0; i < n_x; ++i) {
            // X never lands last in the body, so something follows it before F
            std::size_t pos = pick(body.size());
            while (pos > 0 && body[pos - 1] == "X") pos = pick(body.size());  // keep X-Y pairs intact
            body.insert(body.begin() + static_cast<std::ptrdiff_t>(pos), "X");
            if (t.chained) {
                body.insert(body.begin() + static_cast<std::ptrdiff_t>(pos) + 1, "Y");
            } else if (body[pos + 1] == "X" || body[pos + 1] == "Y") {
                body.insert(body.begin() + static_cast<std::ptrdiff_t>(pos) + 1, middle[pick(middle.size())]);
            }
        }
        if (!t.chained && coin(0.5)) body.push_back("Y");
    } else if (coin(0.3)) {
        body.insert(body.begin() + static_cast<std::ptrdiff_t>(pick(body.size() + 1)), "Y");
    }
    t.activities.push_back("A");
    t.activities.insert(t.activities.end(), body.begin(), body.end());
    t.activities.push_back("F");
    return t;
}

// Exponential inter-event times (mean 10 minutes), derived times filled in.
inline eventlog::EventLog synthetic_log(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(1.0 / 600.0);
    std::vector<eventlog::Trace> traces;
    for (std::size_t i = 0; i < n; ++i) {
        auto s = synthetic_trace(rng);
        eventlog::Trace t{"s" + std::to_string(i), {}};
        double clock = 0.0;
        for (const auto& a : s.activities) {
            t.events.push_back({a, static_cast<TimestampMs>(clock * 1000.0)});
            clock += gap(rng);
        }
        traces.push_back(std::move(t));
    }
    return eventlog::derive_times(eventlog::make_log(std::move(traces), "synthetic", "memory"));
}

} // namespace cosmo::testing
