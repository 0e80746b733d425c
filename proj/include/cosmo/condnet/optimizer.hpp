#pragma once

#include "cosmo/condnet/parameters.hpp"

namespace cosmo::condnet {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;  // global L2 norm; <= 0 disables clipping
};

class Adam {
public:
    Adam(AdamConfig config, const Parameters& like);

    // Clips `grad` in place, then updates `params`. Returns the pre-clip norm.
    double step(Parameters& params, Parameters& grad);
    long steps() const noexcept { return t_; }

private:
    AdamConfig cfg_;
    Parameters m_, v_;
    long t_ = 0;
};

} // namespace cosmo::condnet
