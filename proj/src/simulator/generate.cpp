#include "cosmo/simulator/generate.hpp"

#include <algorithm>
#include <cmath>

#include "cosmo/error.hpp"

namespace cosmo::simulator {

using condnet::Vocabulary;

int sample_token(const Eigen::VectorXd& logits, Sampling sampling, double temperature, std::mt19937_64& rng) {
    const auto n = logits.size();
    Eigen::Index best = Vocabulary::EOS;
    for (Eigen::Index i = Vocabulary::EOS; i < n; ++i)
        if (logits[i] > logits[best]) best = i;
    if (sampling == Sampling::Argmax) return static_cast<int>(best);
    if (!(temperature > 0.0)) throw ValidationError("temperature must be > 0 for multinomial sampling");
    std::vector<double> weights(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (Eigen::Index i = Vocabulary::EOS; i < n; ++i) {
        double w = std::exp((logits[i] - logits[best]) / temperature);
        weights[static_cast<std::size_t>(i)] = w;
        total += w;
    }
    // 53 random bits -> [0, 1); avoids implementation-defined distributions
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    double acc = 0.0;
    for (Eigen::Index i = Vocabulary::EOS; i < n; ++i) {
        acc += weights[static_cast<std::size_t>(i)];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(best);
}

GeneratedTrace generate_trace(const condnet::ConditionedNet& net, const Eigen::VectorXd& condition,
                              const std::string& seed_activity, const GenerationOptions& options,
                              std::mt19937_64& rng) {
    if (options.max_len == 0) throw ValidationError("max_len must be at least 1");
    const auto& exec = net.exec_normalizer();
    const auto& rem = net.remaining_normalizer();
    auto remaining = [&](double z) { return std::max(0.0, rem.denormalize(z)); };

    GeneratedTrace g;
    auto state = net.start();
    auto out = net.step(state, Vocabulary::BOS, exec.normalize(0.0), condition);
    int token = net.vocabulary().encode(seed_activity, g.unknown_seed);
    double prev_remaining = remaining(out.time);
    g.activities.push_back(seed_activity);
    g.execution_times.push_back(0.0);
    g.remaining_times.push_back(prev_remaining);
    out = net.step(state, token, exec.normalize(0.0), condition);

    while (g.activities.size() < options.max_len) {
        int next = sample_token(out.logits, options.sampling, options.temperature, rng);
        if (next == Vocabulary::EOS) return g;
        double r = remaining(out.time);
        double e = std::max(0.0, prev_remaining - r);
        g.activities.push_back(net.vocabulary().label(next));
        g.execution_times.push_back(e);
        g.remaining_times.push_back(r);
        prev_remaining = r;
        out = net.step(state, next, exec.normalize(e), condition);
    }
    g.truncated = true;
    return g;
}

} // namespace cosmo::simulator
