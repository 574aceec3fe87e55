#pragma once

#include "imvol/agent.hpp"
#include "imvol/mlp.hpp"
#include "imvol/optim.hpp"

namespace imvol {

struct DdpgConfig {
    std::vector<int> hidden{400, 300};
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double gamma = 0.99;
    double tau = 0.005;
    double noise_std = 0.1;
    double grad_clip = 1.0;
    int gradient_iterations = 10;
};

// Deterministic policy gradient with target networks. The actor's tanh head
// is mapped to [0,1] via (out+1)/2; exploration adds clipped Gaussian noise.
class DdpgAgent final : public Agent {
public:
    DdpgAgent(int state_dim, int action_dim, DdpgConfig cfg, std::uint64_t init_seed);

    std::vector<double> select_action(const std::vector<double>& state, bool explore,
                                      Rng& rng) override;
    LossReport update(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) override;
    nlohmann::json checkpoint() const override;
    void restore(const nlohmann::json& doc) override;
    std::string name() const override { return "ddpg"; }

    /// One gradient iteration on an explicit batch; exposed for oracle tests.
    LossReport update_once(const Batch& batch);

    const DdpgConfig& config() const { return cfg_; }
    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }

    Mlp& actor() { return actor_; }
    Mlp& critic() { return critic_; }
    Mlp& target_actor() { return target_actor_; }
    Mlp& target_critic() { return target_critic_; }

private:
    int state_dim_ = 0;
    int action_dim_ = 0;
    DdpgConfig cfg_;

    Mlp actor_;
    Mlp critic_;
    Mlp target_actor_;
    Mlp target_critic_;

    AdamState actor_opt_;
    AdamState critic_opt_;
};

}  // namespace imvol
