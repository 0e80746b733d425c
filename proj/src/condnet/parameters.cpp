#include "cosmo/condnet/parameters.hpp"

#include <cmath>
#include <random>

namespace cosmo::condnet {

nlohmann::json NetShape::to_json() const {
    return {{"vocab", vocab},   {"m", m},           {"d_emb", d_emb},         {"d_time", d_time},
            {"hidden", hidden}, {"layers", layers}, {"head_hidden", head_hidden}};
}

NetShape NetShape::from_json(const nlohmann::json& j) {
    NetShape s;
    s.vocab = j.at("vocab").get<std::size_t>();
    s.m = j.at("m").get<std::size_t>();
    s.d_emb = j.at("d_emb").get<std::size_t>();
    s.d_time = j.at("d_time").get<std::size_t>();
    s.hidden = j.at("hidden").get<std::size_t>();
    s.layers = j.at("layers").get<std::size_t>();
    s.head_hidden = j.value("head_hidden", std::size_t{0});
    return s;
}

Parameters Parameters::zeros(const NetShape& s) {
    auto z = [](std::size_t r, std::size_t c) {
        return MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    };
    Parameters p;
    p.embedding = z(s.d_emb, s.vocab);
    p.time_proj = z(s.d_time, 1);
    p.time_bias = z(s.d_time, 1);
    for (std::size_t l = 0; l < s.layers; ++l) {
        LayerParams lp;
        lp.U = z(s.hidden, s.d_in());
        lp.W = z(s.hidden, s.hidden);
        lp.Q = z(s.hidden, s.m);
        lp.V = z(s.d_in(), s.hidden);
        lp.b_h = z(s.hidden, 1);
        lp.b_y = z(s.d_in(), 1);
        p.layers.push_back(std::move(lp));
    }
    p.head_w1 = z(s.head_width(), s.d_in());
    p.head_b1 = z(s.head_width(), 1);
    p.head_wa = z(s.vocab, s.head_width());
    p.head_ba = z(s.vocab, 1);
    p.head_wt = z(1, s.head_width());
    p.head_bt = z(1, 1);
    return p;
}

Parameters Parameters::random(const NetShape& s, std::uint64_t seed) {
    Parameters p = zeros(s);
    std::mt19937_64 rng(seed);
    auto fill = [&](MatrixXd& t) {
        if (t.cols() == 0) return;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double bound = 1.0 / std::sqrt(static_cast<double>(t.cols()));
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = bound * u(rng);
    };
    std::normal_distribution<double> n(0.0, 1.0);
    for (Eigen::Index i = 0; i < p.embedding.size(); ++i) p.embedding.data()[i] = n(rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < p.time_proj.size(); ++i) p.time_proj.data()[i] = u(rng);
    for (auto& l : p.layers) {
        fill(l.U);
        fill(l.W);
        fill(l.Q);
        fill(l.V);
    }
    fill(p.head_w1);
    fill(p.head_wa);
    fill(p.head_wt);
    return p;
}

std::vector<MatrixXd*> Parameters::tensors() {
    std::vector<MatrixXd*> out;
    for_each([&](const std::string&, MatrixXd& t) { out.push_back(&t); });
    return out;
}

std::size_t Parameters::count() const {
    std::size_t n = 0;
    for_each([&](const std::string&, const MatrixXd& t) { n += static_cast<std::size_t>(t.size()); });
    return n;
}

void Parameters::set_zero() {
    for_each([](const std::string&, MatrixXd& t) { t.setZero(); });
}

double Parameters::squared_norm() const {
    double s = 0.0;
    for_each([&](const std::string&, const MatrixXd& t) { s += t.squaredNorm(); });
    return s;
}

bool Parameters::all_finite() const {
    bool ok = true;
    for_each([&](const std::string&, const MatrixXd& t) { ok = ok && t.allFinite(); });
    return ok;
}

} // namespace cosmo::condnet
