#pragma once

#include <cstdint>
#include <vector>

#include "imvol/mlp.hpp"

namespace imvol {

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over a network's layer list. Moments are shaped
// exactly like the parameters they track.
class AdamState {
public:
    AdamState() = default;
    AdamState(const std::vector<LayerParam>& params, AdamConfig cfg = {});

    void step(std::vector<LayerParam>& params, const std::vector<LayerParam>& grads);

    std::int64_t steps_taken() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::int64_t t_ = 0;
    std::vector<LayerParam> m_;
    std::vector<LayerParam> v_;
};

/// Adam for a single scalar parameter (the SAC temperature's log alpha).
class ScalarAdam {
public:
    explicit ScalarAdam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void step(double& param, double grad);

    std::int64_t steps_taken() const { return t_; }

private:
    AdamConfig cfg_;
    std::int64_t t_ = 0;
    double m_ = 0.0;
    double v_ = 0.0;
};

/// Global-norm gradient clipping: if the L2 norm over all entries exceeds
/// max_norm, scales every gradient by max_norm/norm. Returns the pre-clip norm.
double clip_grad_norm(std::vector<LayerParam>& grads, double max_norm = 1.0);

/// Polyak averaging: target <- (1 - tau) * target + tau * online, elementwise.
void soft_update(std::vector<LayerParam>& target, const std::vector<LayerParam>& online,
                 double tau = 0.005);
void soft_update(Mlp& target, const Mlp& online, double tau = 0.005);

}  // namespace imvol
