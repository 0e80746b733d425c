#pragma once

#include <cstdint>
#include <vector>

#include "cosmo/condnet/batch.hpp"
#include "cosmo/condnet/parameters.hpp"
#include "cosmo/condnet/time_normalizer.hpp"
#include "cosmo/condnet/vocabulary.hpp"

namespace cosmo::condnet {

enum class Reduction { Mean, Sum };

struct LossOptions {
    double lambda_time = 1.0;
    Reduction reduction = Reduction::Mean;
};

// ce and mse are always means over unmasked steps; loss follows the
// configured reduction.
struct LossResult {
    double loss = 0.0;
    double ce = 0.0;
    double mse = 0.0;
    std::size_t steps = 0;
    std::size_t correct = 0;
};

// Per-step activations of one layer; each entry has one column per sequence.
struct LayerActivations {
    std::vector<MatrixXd> x, h, o, y;  // o = tanh(V h + b_y), y = o + x
};

struct ForwardCache {
    std::vector<LayerActivations> layers;
    std::vector<MatrixXd> z, logits, time;
};

// h_t = tanh(U x_t + W h_{t-1} + Q c + b_h), y_t = tanh(V h_t + b_y) + x_t,
// stacked; an MLP head maps the top y_t to activity logits and a normalized
// remaining-time prediction.
class ConditionedNet {
public:
    ConditionedNet() = default;
    ConditionedNet(NetShape shape, Vocabulary vocab, TimeNormalizer exec, TimeNormalizer remaining,
                   std::uint64_t seed);
    // Adopts existing parameters; throws CheckpointError on shape mismatch.
    ConditionedNet(NetShape shape, Vocabulary vocab, TimeNormalizer exec, TimeNormalizer remaining,
                   Parameters params);

    const NetShape& shape() const noexcept { return shape_; }
    const Vocabulary& vocabulary() const noexcept { return vocab_; }
    const TimeNormalizer& exec_normalizer() const noexcept { return exec_; }
    const TimeNormalizer& remaining_normalizer() const noexcept { return remaining_; }
    Parameters& params() noexcept { return params_; }
    const Parameters& params() const noexcept { return params_; }

    // Layer-0 input for one step: [embedding(token) ; time_proj * z + time_bias].
    MatrixXd encode_step(std::span<const int> tokens, const Eigen::RowVectorXd& exec_norm) const;

    // Throws RuntimeFailure naming layer and step on non-finite activations.
    ForwardCache forward(const Batch& batch) const;
    LossResult loss(const Batch& batch, const LossOptions& opt = {}) const;
    // Overwrites `grad` (shaped like params()) with dLoss/dparams via BPTT.
    LossResult gradient(const Batch& batch, const LossOptions& opt, Parameters& grad) const;

    struct State {
        std::vector<VectorXd> h;
    };
    struct StepOutput {
        VectorXd logits;
        double time = 0.0;  // normalized remaining time
    };
    State start() const;
    // Single-sequence incremental forward used by generation.
    StepOutput step(State& state, int token, double exec_norm, const VectorXd& condition) const;

private:
    LossResult score(const ForwardCache& cache, const Batch& batch, const LossOptions& opt,
                     std::vector<MatrixXd>* d_logits, std::vector<MatrixXd>* d_time) const;

    NetShape shape_;
    Vocabulary vocab_;
    TimeNormalizer exec_;
    TimeNormalizer remaining_;
    Parameters params_;
};

} // namespace cosmo::condnet
