#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "cosmo/condnet/trainer.hpp"

namespace cosmo::condnet {

struct GridPoint {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t input_size = 32;  // embedding width
    std::size_t hidden = 128;
    std::size_t layers = 1;

    nlohmann::json to_json() const;
    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct GridSpace {
    std::vector<double> learning_rates;
    std::vector<std::size_t> batch_sizes;
    std::vector<std::size_t> input_sizes;
    std::vector<std::size_t> hidden_sizes;
    std::vector<std::size_t> layers;

    // lr {5e-3, 1e-3, 5e-4, 1e-4}, batch {16, 32, 256, 512},
    // input {16, 32, 64, 128, 256}, hidden {32 .. 1024}, layers {1, 2, 4}.
    static GridSpace paper();
    // Missing keys fall back to the paper grid.
    static GridSpace from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::size_t size() const;
    // Lexicographic in field order (learning rate outermost).
    std::vector<GridPoint> expand() const;
};

struct LeaderboardEntry {
    GridPoint point;
    double validation_loss = 0.0;
};

struct GridResult {
    GridPoint best;
    std::vector<LeaderboardEntry> leaderboard;  // ascending loss, ties by grid order

    nlohmann::json to_json() const;
};

using GridEvaluator = std::function<double(const GridPoint&)>;

// Evaluates every point, or a seeded sample of `budget` points. Non-finite
// losses rank last.
GridResult grid_search(const GridSpace& space, const GridEvaluator& evaluate, std::optional<std::size_t> budget = {},
                       std::uint64_t seed = 42);

// Trains a fresh net per point and returns its best validation loss.
GridEvaluator training_evaluator(const Encoders& enc, std::size_t m, std::span<const Sample> training,
                                 std::span<const Sample> validation, TrainConfig base, std::size_t d_time = 8);

} // namespace cosmo::condnet
