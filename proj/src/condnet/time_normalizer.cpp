#include "cosmo/condnet/time_normalizer.hpp"

#include <cmath>

#include "cosmo/error.hpp"

namespace cosmo::condnet {

TimeNormalizer TimeNormalizer::fit(std::span<const double> seconds, double scale) {
    if (!(scale > 0.0)) throw ValidationError("time scale must be positive");
    TimeNormalizer n;
    n.scale = scale;
    if (seconds.empty()) return n;
    double sum = 0.0;
    for (double x : seconds) sum += std::log1p(x / scale);
    n.mean = sum / static_cast<double>(seconds.size());
    double var = 0.0;
    for (double x : seconds) {
        double d = std::log1p(x / scale) - n.mean;
        var += d * d;
    }
    n.std = std::sqrt(var / static_cast<double>(seconds.size()));
    if (!(n.std > 1e-12)) n.std = 1.0;
    return n;
}

double TimeNormalizer::normalize(double seconds) const { return (std::log1p(seconds / scale) - mean) / std; }

double TimeNormalizer::denormalize(double z) const { return scale * std::expm1(z * std + mean); }

nlohmann::json TimeNormalizer::to_json() const { return {{"scale", scale}, {"mean", mean}, {"std", std}}; }

TimeNormalizer TimeNormalizer::from_json(const nlohmann::json& j) {
    TimeNormalizer n;
    n.scale = j.at("scale").get<double>();
    n.mean = j.at("mean").get<double>();
    n.std = j.at("std").get<double>();
    return n;
}

} // namespace cosmo::condnet
