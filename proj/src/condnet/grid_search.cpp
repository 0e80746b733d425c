#include "cosmo/condnet/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cosmo/error.hpp"

namespace cosmo::condnet {

nlohmann::json GridPoint::to_json() const {
    return {{"learning_rate", learning_rate},
            {"batch_size", batch_size},
            {"input_size", input_size},
            {"hidden", hidden},
            {"layers", layers}};
}

GridSpace GridSpace::paper() {
    return {{5e-3, 1e-3, 5e-4, 1e-4}, {16, 32, 256, 512}, {16, 32, 64, 128, 256}, {32, 64, 128, 256, 512, 1024}, {1, 2, 4}};
}

GridSpace GridSpace::from_json(const nlohmann::json& j) {
    GridSpace s = paper();
    if (j.contains("learning_rates")) s.learning_rates = j["learning_rates"].get<std::vector<double>>();
    if (j.contains("batch_sizes")) s.batch_sizes = j["batch_sizes"].get<std::vector<std::size_t>>();
    if (j.contains("input_sizes")) s.input_sizes = j["input_sizes"].get<std::vector<std::size_t>>();
    if (j.contains("hidden_sizes")) s.hidden_sizes = j["hidden_sizes"].get<std::vector<std::size_t>>();
    if (j.contains("layers")) s.layers = j["layers"].get<std::vector<std::size_t>>();
    return s;
}

nlohmann::json GridSpace::to_json() const {
    return {{"learning_rates", learning_rates},
            {"batch_sizes", batch_sizes},
            {"input_sizes", input_sizes},
            {"hidden_sizes", hidden_sizes},
            {"layers", layers}};
}

std::size_t GridSpace::size() const {
    return learning_rates.size() * batch_sizes.size() * input_sizes.size() * hidden_sizes.size() * layers.size();
}

std::vector<GridPoint> GridSpace::expand() const {
    std::vector<GridPoint> out;
    out.reserve(size());
    for (double lr : learning_rates)
        for (auto b : batch_sizes)
            for (auto in : input_sizes)
                for (auto h : hidden_sizes)
                    for (auto l : layers) out.push_back({lr, b, in, h, l});
    return out;
}

nlohmann::json GridResult::to_json() const {
    nlohmann::json board = nlohmann::json::array();
    for (const auto& e : leaderboard) {
        auto j = e.point.to_json();
        j["validation_loss"] = std::isfinite(e.validation_loss) ? nlohmann::json(e.validation_loss) : nlohmann::json(nullptr);
        board.push_back(std::move(j));
    }
    return {{"best", best.to_json()}, {"leaderboard", board}};
}

GridResult grid_search(const GridSpace& space, const GridEvaluator& evaluate, std::optional<std::size_t> budget,
                       std::uint64_t seed) {
    auto points = space.expand();
    if (points.empty()) throw ValidationError("empty hyper-parameter grid");
    std::vector<std::size_t> chosen(points.size());
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    if (budget && *budget < points.size()) {
        if (*budget == 0) throw ValidationError("grid budget must be at least 1");
        std::mt19937_64 rng(seed);
        std::shuffle(chosen.begin(), chosen.end(), rng);
        chosen.resize(*budget);
        std::sort(chosen.begin(), chosen.end());
    }
    std::vector<std::pair<double, std::size_t>> scored;
    for (auto i : chosen) {
        double loss = evaluate(points[i]);
        scored.emplace_back(std::isfinite(loss) ? loss : INFINITY, i);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    GridResult r;
    for (const auto& [loss, i] : scored) r.leaderboard.push_back({points[i], loss});
    r.best = r.leaderboard.front().point;
    return r;
}

GridEvaluator training_evaluator(const Encoders& enc, std::size_t m, std::span<const Sample> training,
                                 std::span<const Sample> validation, TrainConfig base, std::size_t d_time) {
    return [=, &enc](const GridPoint& p) {
        NetShape shape;
        shape.vocab = enc.vocab.size();
        shape.m = m;
        shape.d_emb = p.input_size;
        shape.d_time = d_time;
        shape.hidden = p.hidden;
        shape.layers = p.layers;
        ConditionedNet net(shape, enc.vocab, enc.exec, enc.remaining, base.seed);
        TrainConfig cfg = base;
        cfg.learning_rate = p.learning_rate;
        cfg.batch_size = p.batch_size;
        try {
            auto result = train(net, training, validation, cfg);
            return result.best_loss;
        } catch (const RuntimeFailure&) {
            return static_cast<double>(INFINITY);
        }
    };
}

} // namespace cosmo::condnet
