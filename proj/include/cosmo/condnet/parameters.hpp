#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace cosmo::condnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct NetShape {
    std::size_t vocab = 0;  // including reserved tokens
    std::size_t m = 0;      // constraint-vector length
    std::size_t d_emb = 32;
    std::size_t d_time = 8;
    std::size_t hidden = 128;
    std::size_t layers = 1;
    std::size_t head_hidden = 0;  // 0 = same as hidden

    std::size_t d_in() const noexcept { return d_emb + d_time; }
    std::size_t head_width() const noexcept { return head_hidden ? head_hidden : hidden; }

    nlohmann::json to_json() const;
    static NetShape from_json(const nlohmann::json& j);
    friend bool operator==(const NetShape&, const NetShape&) = default;
};

// Matrices are stored output-major: U is hidden x d_in, Q is hidden x m.
struct LayerParams {
    MatrixXd U, W, Q, V;
    MatrixXd b_h, b_y;  // column vectors
};

struct Parameters {
    MatrixXd embedding;  // d_emb x vocab, one column per token
    MatrixXd time_proj;  // d_time x 1
    MatrixXd time_bias;  // d_time x 1
    std::vector<LayerParams> layers;
    MatrixXd head_w1, head_b1;  // head_width x d_in, head_width x 1
    MatrixXd head_wa, head_ba;  // vocab x head_width, vocab x 1
    MatrixXd head_wt, head_bt;  // 1 x head_width, 1 x 1

    static Parameters zeros(const NetShape& s);
    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases zero; embeddings N(0, 1).
    static Parameters random(const NetShape& s, std::uint64_t seed);

    // Visits every tensor with a stable name, in a fixed order.
    template <class F>
    void for_each(F&& f) {
        f(std::string("embedding"), embedding);
        f(std::string("time_proj"), time_proj);
        f(std::string("time_bias"), time_bias);
        for (std::size_t l = 0; l < layers.size(); ++l) {
            std::string p = "layer" + std::to_string(l) + ".";
            f(p + "U", layers[l].U);
            f(p + "W", layers[l].W);
            f(p + "Q", layers[l].Q);
            f(p + "V", layers[l].V);
            f(p + "b_h", layers[l].b_h);
            f(p + "b_y", layers[l].b_y);
        }
        f(std::string("head.w1"), head_w1);
        f(std::string("head.b1"), head_b1);
        f(std::string("head.wa"), head_wa);
        f(std::string("head.ba"), head_ba);
        f(std::string("head.wt"), head_wt);
        f(std::string("head.bt"), head_bt);
    }
    template <class F>
    void for_each(F&& f) const {
        const_cast<Parameters*>(this)->for_each([&](const std::string& n, MatrixXd& t) { f(n, std::as_const(t)); });
    }

    std::vector<MatrixXd*> tensors();
    std::size_t count() const;
    void set_zero();
    double squared_norm() const;
    bool all_finite() const;
};

} // namespace cosmo::condnet
