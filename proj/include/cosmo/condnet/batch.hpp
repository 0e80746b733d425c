#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cosmo/condnet/time_normalizer.hpp"
#include "cosmo/condnet/vocabulary.hpp"
#include "cosmo/declare/universe.hpp"

namespace cosmo::condnet {

// One training sequence: inputs [BOS, e0..e(n-1)] with normalized execution
// times, targets [e0..e(n-1), EOS] with normalized remaining times.
struct Sample {
    std::vector<int> inputs;
    std::vector<double> input_times;
    std::vector<int> targets;
    std::vector<double> target_times;
    Eigen::VectorXd condition;

    std::size_t length() const noexcept { return inputs.size(); }
};

// Expects derived times on the trace. Unknown activities become PAD.
Sample encode_sample(const eventlog::Trace& trace, const declare::ConstraintVector& phi, const Vocabulary& vocab,
                     const TimeNormalizer& exec, const TimeNormalizer& remaining, std::size_t& unknown);

// Time-major, right-padded: element (t, j) of a steps x size grid lives at
// t * size + j; mask is 1 on real steps.
struct Batch {
    std::size_t steps = 0;
    std::size_t size = 0;
    std::vector<int> inputs;
    std::vector<int> targets;
    Eigen::MatrixXd input_times;   // steps x size
    Eigen::MatrixXd target_times;  // steps x size
    Eigen::MatrixXd mask;          // steps x size
    Eigen::MatrixXd condition;     // m x size

    int input(std::size_t t, std::size_t j) const { return inputs[t * size + j]; }
    int target(std::size_t t, std::size_t j) const { return targets[t * size + j]; }
};

// `steps` = 0 pads to the longest sample.
Batch make_batch(std::span<const Sample* const> samples, std::size_t steps = 0);
Batch make_batch(std::span<const Sample> samples, std::size_t steps = 0);

} // namespace cosmo::condnet
