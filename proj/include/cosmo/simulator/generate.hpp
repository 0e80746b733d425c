#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cosmo/condnet/net.hpp"

namespace cosmo::simulator {

enum class Sampling { Multinomial, Argmax };

struct GenerationOptions {
    Sampling sampling = Sampling::Multinomial;
    double temperature = 1.0;
    std::size_t max_len = 0;  // events including the seed; must be >= 1
};

struct GeneratedTrace {
    std::vector<std::string> activities;
    std::vector<double> execution_times;  // seconds, first is 0
    std::vector<double> remaining_times;  // predicted, de-normalized, clamped at 0
    bool truncated = false;               // stopped by max_len rather than EOS
    std::size_t unknown_seed = 0;         // 1 when the seed activity was outside the vocabulary
};

// Draws a token from logits; PAD and BOS are never drawn.
int sample_token(const Eigen::VectorXd& logits, Sampling sampling, double temperature, std::mt19937_64& rng);

// Feeds BOS, then the seed event with execution time 0, then each sampled
// activity with execution time max(0, previous predicted remaining time -
// current predicted remaining time), until EOS or max_len events.
GeneratedTrace generate_trace(const condnet::ConditionedNet& net, const Eigen::VectorXd& condition,
                              const std::string& seed_activity, const GenerationOptions& options,
                              std::mt19937_64& rng);

} // namespace cosmo::simulator
