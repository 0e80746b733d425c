#include "cosmo/condnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cosmo/error.hpp"

namespace cosmo::condnet {

void TrainConfig::validate() const {
    std::vector<std::string> errors;
    if (!(learning_rate >= 0.0)) errors.push_back("learning_rate must be >= 0");
    if (batch_size == 0) errors.push_back("batch_size must be >= 1");
    if (!(lambda_time >= 0.0)) errors.push_back("lambda_time must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) errors.push_back("betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) errors.push_back("epsilon must be > 0");
    if (!errors.empty()) throw ValidationError("invalid training configuration", errors);
}

AdamConfig TrainConfig::adam() const { return {learning_rate, beta1, beta2, epsilon, clip_norm}; }

nlohmann::json TrainConfig::to_json() const {
    return {{"learning_rate", learning_rate},
            {"batch_size", batch_size},
            {"epochs", epochs},
            {"seed", seed},
            {"beta1", beta1},
            {"beta2", beta2},
            {"epsilon", epsilon},
            {"clip_norm", clip_norm},
            {"patience", patience},
            {"lambda_time", lambda_time},
            {"reduction", reduction == Reduction::Mean ? "mean" : "sum"}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
    c.patience = j.value("patience", c.patience);
    c.lambda_time = j.value("lambda_time", c.lambda_time);
    auto red = j.value("reduction", std::string("mean"));
    if (red != "mean" && red != "sum") throw ValidationError("reduction must be \"mean\" or \"sum\"");
    c.reduction = red == "mean" ? Reduction::Mean : Reduction::Sum;
    return c;
}

nlohmann::json EpochMetrics::to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"epoch", epoch},        {"train_ce", train_ce}, {"train_mse", train_mse},
            {"val_ce", opt(val_ce)}, {"val_mse", opt(val_mse)}, {"val_acc", opt(val_acc)}};
}

Encoders fit_encoders(const eventlog::EventLog& train, double time_scale) {
    std::vector<double> exec, remaining;
    for (const auto& t : train.traces) {
        exec.push_back(0.0);
        for (const auto& e : t.events) {
            exec.push_back(e.execution_time);
            remaining.push_back(e.remaining_time);
        }
        remaining.push_back(0.0);
    }
    return {Vocabulary::fit(train), TimeNormalizer::fit(exec, time_scale), TimeNormalizer::fit(remaining, time_scale)};
}

std::vector<Sample> encode_log(const eventlog::EventLog& log, const declare::ConstraintUniverse& u,
                               const Vocabulary& vocab, const TimeNormalizer& exec, const TimeNormalizer& remaining) {
    std::vector<Sample> out;
    out.reserve(log.traces.size());
    std::size_t unknown = 0;
    for (const auto& aug : declare::augment(log, u))
        out.push_back(encode_sample(*aug.trace, aug.phi, vocab, exec, remaining, unknown));
    return out;
}

LossResult evaluate(const ConditionedNet& net, std::span<const Sample> samples, const LossOptions& opt,
                    std::size_t chunk) {
    LossResult total;
    double ce = 0.0, mse = 0.0;
    for (std::size_t i = 0; i < samples.size(); i += chunk) {
        auto part = samples.subspan(i, std::min(chunk, samples.size() - i));
        LossResult r = net.loss(make_batch(part), opt);
        ce += r.ce * static_cast<double>(r.steps);
        mse += r.mse * static_cast<double>(r.steps);
        total.steps += r.steps;
        total.correct += r.correct;
    }
    if (total.steps == 0) return total;
    total.ce = ce / static_cast<double>(total.steps);
    total.mse = mse / static_cast<double>(total.steps);
    total.loss = total.ce + opt.lambda_time * total.mse;
    return total;
}

TrainResult train(ConditionedNet& net, std::span<const Sample> training, std::span<const Sample> validation,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    if (training.empty()) throw DataError("no training samples");
    const LossOptions opt = config.loss_options();
    Adam adam(config.adam(), net.params());
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(training.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    Parameters best = net.params();
    bool have_best = false;
    std::size_t since_best = 0;
    Parameters grad;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double ce = 0.0, mse = 0.0;
        std::size_t steps = 0;
        for (std::size_t i = 0; i < order.size(); i += config.batch_size) {
            std::vector<const Sample*> members;
            for (std::size_t k = i; k < std::min(order.size(), i + config.batch_size); ++k)
                members.push_back(&training[order[k]]);
            Batch b = make_batch(members);
            LossResult r = net.gradient(b, opt, grad);
            if (!std::isfinite(r.loss) || !grad.all_finite())
                throw RuntimeFailure("training diverged in epoch " + std::to_string(epoch) +
                                     (epoch ? "; last stable epoch " + std::to_string(epoch - 1) : std::string()));
            adam.step(net.params(), grad);
            ce += r.ce * static_cast<double>(r.steps);
            mse += r.mse * static_cast<double>(r.steps);
            steps += r.steps;
        }
        EpochMetrics m;
        m.epoch = epoch;
        m.train_ce = ce / static_cast<double>(steps);
        m.train_mse = mse / static_cast<double>(steps);
        double score = m.train_ce + opt.lambda_time * m.train_mse;
        if (!validation.empty()) {
            LossResult v = evaluate(net, validation, opt);
            m.val_ce = v.ce;
            m.val_mse = v.mse;
            m.val_acc = static_cast<double>(v.correct) / static_cast<double>(v.steps);
            score = v.loss;
        }
        if (!std::isfinite(score))
            throw RuntimeFailure("training diverged in epoch " + std::to_string(epoch) +
                                 (epoch ? "; last stable epoch " + std::to_string(epoch - 1) : std::string()));
        result.history.push_back(m);
        if (on_epoch) on_epoch(m);
        if (!have_best || score < result.best_loss) {
            have_best = true;
            result.best_loss = score;
            result.best_epoch = epoch;
            best = net.params();
            since_best = 0;
        } else if (config.patience > 0 && ++since_best >= config.patience) {
            result.early_stopped = true;
            break;
        }
    }
    if (have_best) net.params() = best;
    return result;
}

} // namespace cosmo::condnet
