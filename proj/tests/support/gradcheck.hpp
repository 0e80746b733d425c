#pragma once

// Central finite differences over every parameter entry, compared with the
// analytic gradient. Used as the oracle for backpropagation through time.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "cosmo/condnet/net.hpp"

namespace cosmo::testing {

struct GradCheck {
    std::map<std::string, double> worst;  // parameter group -> max relative error
    double max_error = 0.0;
};

inline std::string group_of(const std::string& tensor) {
    auto dot = tensor.find('.');
    return dot == std::string::npos ? tensor : tensor.substr(dot + 1);
}

inline GradCheck finite_difference_check(condnet::ConditionedNet& net, const condnet::Batch& batch,
                                         const condnet::LossOptions& opt, double step = 1e-5) {
    condnet::Parameters analytic;
    net.gradient(batch, opt, analytic);
    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> grads;
    analytic.for_each([&](const std::string& n, const Eigen::MatrixXd& t) { grads.emplace_back(n, &t); });
    GradCheck out;
    std::size_t i = 0;
    net.params().for_each([&](const std::string& name, Eigen::MatrixXd& t) {
        const auto& g = *grads[i++].second;
        double& worst = out.worst[group_of(name)];
        for (Eigen::Index k = 0; k < t.size(); ++k) {
            double saved = t.data()[k];
            t.data()[k] = saved + step;
            double up = net.loss(batch, opt).loss;
            t.data()[k] = saved - step;
            double down = net.loss(batch, opt).loss;
            t.data()[k] = saved;
            double numeric = (up - down) / (2.0 * step);
            double a = g.data()[k];
            double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-5});
            worst = std::max(worst, rel);
            out.max_error = std::max(out.max_error, rel);
        }
    });
    return out;
}

// Random sequences of the given lengths over `vocab` tokens (activities
// start at 3), random times and random 0/1 conditions of width m.
inline std::vector<condnet::Sample> random_samples(std::size_t vocab, std::size_t m,
                                                   const std::vector<std::size_t>& lengths, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> tok(3, static_cast<int>(vocab) - 1);
    std::normal_distribution<double> time(0.0, 1.0);
    std::vector<condnet::Sample> out;
    for (auto len : lengths) {
        condnet::Sample s;
        s.inputs.push_back(condnet::Vocabulary::BOS);
        for (std::size_t t = 1; t < len; ++t) s.inputs.push_back(tok(rng));
        for (std::size_t t = 1; t < len; ++t) s.targets.push_back(s.inputs[t]);
        s.targets.push_back(condnet::Vocabulary::EOS);
        for (std::size_t t = 0; t < len; ++t) {
            s.input_times.push_back(time(rng));
            s.target_times.push_back(time(rng));
        }
        s.condition = Eigen::VectorXd(static_cast<Eigen::Index>(m));
        for (Eigen::Index k = 0; k < s.condition.size(); ++k) s.condition[k] = static_cast<double>(rng() & 1);
        out.push_back(std::move(s));
    }
    return out;
}

inline condnet::ConditionedNet small_net(std::size_t d_emb, std::size_t hidden, std::size_t m, std::size_t layers,
                                         std::uint64_t seed, std::size_t n_activities = 4) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n_activities; ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
    condnet::NetShape shape;
    shape.vocab = labels.size() + 3;
    shape.m = m;
    shape.d_emb = d_emb;
    shape.d_time = 3;
    shape.hidden = hidden;
    shape.layers = layers;
    shape.head_hidden = hidden;
    return condnet::ConditionedNet(shape, condnet::Vocabulary(labels), {}, {}, seed);
}

} // namespace cosmo::testing
