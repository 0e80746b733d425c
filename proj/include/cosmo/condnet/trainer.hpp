#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "cosmo/condnet/net.hpp"
#include "cosmo/condnet/optimizer.hpp"
#include "cosmo/declare/universe.hpp"

namespace cosmo::condnet {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t epochs = 50;
    std::uint64_t seed = 42;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;
    std::size_t patience = 10;  // epochs without validation improvement; 0 = never stop early
    double lambda_time = 1.0;
    Reduction reduction = Reduction::Mean;

    // Throws ValidationError on out-of-range values.
    void validate() const;
    AdamConfig adam() const;
    LossOptions loss_options() const { return {lambda_time, reduction}; }
    nlohmann::json to_json() const;
    // Missing keys keep their defaults.
    static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double train_ce = 0.0;
    double train_mse = 0.0;
    std::optional<double> val_ce, val_mse, val_acc;

    nlohmann::json to_json() const;
};

struct TrainResult {
    std::vector<EpochMetrics> history;
    std::size_t best_epoch = 0;
    double best_loss = 0.0;
    bool early_stopped = false;
};

// Vocabulary and both time normalizers, fitted on training data only.
struct Encoders {
    Vocabulary vocab;
    TimeNormalizer exec;
    TimeNormalizer remaining;
};

// The log must carry derived times.
Encoders fit_encoders(const eventlog::EventLog& train, double time_scale = 1.0);

std::vector<Sample> encode_log(const eventlog::EventLog& log, const declare::ConstraintUniverse& u,
                               const Vocabulary& vocab, const TimeNormalizer& exec, const TimeNormalizer& remaining);

// Aggregate metrics over a sample set, evaluated in chunks of `chunk`.
LossResult evaluate(const ConditionedNet& net, std::span<const Sample> samples, const LossOptions& opt,
                    std::size_t chunk = 256);

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Mini-batch Adam over shuffled samples. The parameters with the best
// validation loss (training loss when `validation` is empty) are restored at
// the end. Throws RuntimeFailure when the loss stops being finite.
TrainResult train(ConditionedNet& net, std::span<const Sample> training, std::span<const Sample> validation,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

} // namespace cosmo::condnet
