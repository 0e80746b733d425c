#include "cosmo/condnet/batch.hpp"

#include <algorithm>

#include "cosmo/error.hpp"

namespace cosmo::condnet {

Sample encode_sample(const eventlog::Trace& trace, const declare::ConstraintVector& phi, const Vocabulary& vocab,
                     const TimeNormalizer& exec, const TimeNormalizer& remaining, std::size_t& unknown) {
    Sample s;
    s.inputs.push_back(Vocabulary::BOS);
    s.input_times.push_back(exec.normalize(0.0));
    for (const auto& e : trace.events) {
        int tok = vocab.encode(e.activity, unknown);
        s.inputs.push_back(tok);
        s.input_times.push_back(exec.normalize(e.execution_time));
        s.targets.push_back(tok);
        s.target_times.push_back(remaining.normalize(e.remaining_time));
    }
    s.targets.push_back(Vocabulary::EOS);
    s.target_times.push_back(remaining.normalize(0.0));
    s.condition = Eigen::VectorXd(static_cast<Eigen::Index>(phi.size()));
    for (std::size_t k = 0; k < phi.size(); ++k) s.condition[static_cast<Eigen::Index>(k)] = phi.bits[k];
    return s;
}

Batch make_batch(std::span<const Sample* const> samples, std::size_t steps) {
    if (samples.empty()) throw ValidationError("empty batch");
    std::size_t longest = 0;
    for (const auto* s : samples) longest = std::max(longest, s->length());
    if (steps == 0) steps = longest;
    if (steps < longest) throw ValidationError("batch steps shorter than the longest sample");
    Batch b;
    b.steps = steps;
    b.size = samples.size();
    auto T = static_cast<Eigen::Index>(steps);
    auto B = static_cast<Eigen::Index>(samples.size());
    b.inputs.assign(steps * b.size, Vocabulary::PAD);
    b.targets.assign(steps * b.size, Vocabulary::PAD);
    b.input_times = Eigen::MatrixXd::Zero(T, B);
    b.target_times = Eigen::MatrixXd::Zero(T, B);
    b.mask = Eigen::MatrixXd::Zero(T, B);
    b.condition = Eigen::MatrixXd::Zero(samples.front()->condition.size(), B);
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const Sample& s = *samples[j];
        if (s.condition.size() != b.condition.rows()) throw ValidationError("condition length differs within batch");
        auto J = static_cast<Eigen::Index>(j);
        b.condition.col(J) = s.condition;
        for (std::size_t t = 0; t < s.length(); ++t) {
            auto Ti = static_cast<Eigen::Index>(t);
            b.inputs[t * b.size + j] = s.inputs[t];
            b.targets[t * b.size + j] = s.targets[t];
            b.input_times(Ti, J) = s.input_times[t];
            b.target_times(Ti, J) = s.target_times[t];
            b.mask(Ti, J) = 1.0;
        }
    }
    return b;
}

Batch make_batch(std::span<const Sample> samples, std::size_t steps) {
    std::vector<const Sample*> ptrs;
    for (const auto& s : samples) ptrs.push_back(&s);
    return make_batch(std::span<const Sample* const>(ptrs), steps);
}

} // namespace cosmo::condnet
