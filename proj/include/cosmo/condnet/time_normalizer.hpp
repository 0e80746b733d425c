#pragma once

#include <span>

#include <json.hpp>

namespace cosmo::condnet {

// z = (ln(1 + x / scale) - mean) / std, x in seconds.
struct TimeNormalizer {
    double scale = 1.0;
    double mean = 0.0;
    double std = 1.0;

    // std falls back to 1 when the transformed values are constant.
    static TimeNormalizer fit(std::span<const double> seconds, double scale = 1.0);

    double normalize(double seconds) const;
    // Inverse of normalize; not clamped.
    double denormalize(double z) const;

    nlohmann::json to_json() const;
    static TimeNormalizer from_json(const nlohmann::json& j);
};

} // namespace cosmo::condnet
