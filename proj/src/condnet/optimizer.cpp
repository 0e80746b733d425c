#include "cosmo/condnet/optimizer.hpp"

#include <cmath>

namespace cosmo::condnet {

Adam::Adam(AdamConfig config, const Parameters& like) : cfg_(config), m_(like), v_(like) {
    m_.set_zero();
    v_.set_zero();
}

double Adam::step(Parameters& params, Parameters& grad) {
    const double norm = std::sqrt(grad.squared_norm());
    if (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) {
        const double s = cfg_.clip_norm / norm;
        for (auto* g : grad.tensors()) *g *= s;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    auto ps = params.tensors();
    auto gs = grad.tensors();
    auto ms = m_.tensors();
    auto vs = v_.tensors();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto& m = *ms[i];
        auto& v = *vs[i];
        const auto& g = *gs[i];
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
        ps[i]->array() -= cfg_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
    }
    return norm;
}

} // namespace cosmo::condnet
