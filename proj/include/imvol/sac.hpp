#pragma once

#include <optional>

#include "imvol/agent.hpp"
#include "imvol/distributions.hpp"
#include "imvol/mlp.hpp"
#include "imvol/optim.hpp"

namespace imvol {

struct SacConfig {
    std::vector<int> hidden{256, 256};
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double alpha_lr = 3e-4;
    double gamma = 0.99;
    double tau = 0.005;
    double init_alpha = 0.2;
    double grad_clip = 1.0;
    int gradient_iterations = 10;
    std::optional<double> target_entropy;  // default: -action_dim
};

// Soft actor-critic with twin Q-critics, target networks, and an auto-tuned
// temperature (stored as log alpha so it stays positive). The actor outputs
// a Gaussian-parameter pair (mean, log_std) whose reparameterized sample is
// tanh-squashed and mapped to [0,1].
class SacAgent final : public Agent {
public:
    SacAgent(int state_dim, int action_dim, SacConfig cfg, std::uint64_t init_seed);

    std::vector<double> select_action(const std::vector<double>& state, bool explore,
                                      Rng& rng) override;
    LossReport update(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) override;
    nlohmann::json checkpoint() const override;
    void restore(const nlohmann::json& doc) override;
    std::string name() const override { return "sac"; }

    /// One gradient iteration on an explicit batch: critics, actor,
    /// temperature, then soft target updates. Exposed for oracle tests.
    LossReport update_once(const Batch& batch, Rng& rng);

    double alpha() const;
    double target_entropy() const { return target_entropy_; }
    const SacConfig& config() const { return cfg_; }
    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }

    Mlp& actor() { return actor_; }
    Mlp& critic1() { return critic1_; }
    Mlp& critic2() { return critic2_; }
    Mlp& target1() { return target1_; }
    Mlp& target2() { return target2_; }

private:
    /// Actor forward producing the split Gaussian head (mean rows on top).
    void actor_head(const Eigen::MatrixXd& states, ForwardTrace& trace, Eigen::MatrixXd& mean,
                    Eigen::MatrixXd& log_std) const;

    int state_dim_ = 0;
    int action_dim_ = 0;
    SacConfig cfg_;
    double target_entropy_ = 0.0;
    double log_alpha_ = 0.0;

    Mlp actor_;
    Mlp critic1_;
    Mlp critic2_;
    Mlp target1_;
    Mlp target2_;

    AdamState actor_opt_;
    AdamState critic1_opt_;
    AdamState critic2_opt_;
    ScalarAdam alpha_opt_;
};

}  // namespace imvol
