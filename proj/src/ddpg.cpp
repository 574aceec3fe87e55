#include "imvol/ddpg.hpp"

#include <algorithm>
#include <stdexcept>

namespace imvol {

namespace {

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
    std::vector<int> sizes;
    sizes.reserve(hidden.size() + 2);
    sizes.push_back(in);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

Eigen::MatrixXd vstack(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
    Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
    out.topRows(top.rows()) = top;
    out.bottomRows(bottom.rows()) = bottom;
    return out;
}

// The tanh head lives in (-1,1); the environment expects [0,1].
Eigen::MatrixXd to_unit_range(const Eigen::MatrixXd& tanh_out) {
    return ((tanh_out.array() + 1.0) * 0.5).matrix();
}

}  // namespace

DdpgAgent::DdpgAgent(int state_dim, int action_dim, DdpgConfig cfg, std::uint64_t init_seed)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      cfg_(std::move(cfg)),
      actor_(net_sizes(state_dim, cfg_.hidden, action_dim), Activation::Tanh),
      critic_(net_sizes(state_dim + action_dim, cfg_.hidden, 1), Activation::Identity) {
    if (state_dim < 1 || action_dim < 1) {
        throw std::invalid_argument("DdpgAgent: dimensions must be positive");
    }
    Rng rng(init_seed);
    actor_.init_uniform(rng);
    critic_.init_uniform(rng);
    target_actor_ = actor_;
    target_critic_ = critic_;
    actor_opt_ = AdamState(actor_.layers(), AdamConfig{cfg_.actor_lr, 0.9, 0.999, 1e-8});
    critic_opt_ = AdamState(critic_.layers(), AdamConfig{cfg_.critic_lr, 0.9, 0.999, 1e-8});
}

std::vector<double> DdpgAgent::select_action(const std::vector<double>& state, bool explore,
                                             Rng& rng) {
    if (state.size() != static_cast<std::size_t>(state_dim_)) {
        throw std::domain_error("DdpgAgent::select_action: state dimension mismatch");
    }
    const Eigen::Map<const Eigen::VectorXd> s(state.data(), state_dim_);
    const Eigen::MatrixXd action = to_unit_range(actor_.forward(s));
    std::vector<double> out(action.data(), action.data() + action.size());
    if (explore) {
        for (double& v : out) {
            v = std::clamp(v + cfg_.noise_std * rng.normal(), 0.0, 1.0);
        }
    }
    return out;
}

LossReport DdpgAgent::update_once(const Batch& batch) {
    const Eigen::Index b = batch.size();
    if (b < 1) throw std::logic_error("DdpgAgent::update_once: empty batch");
    const double batch_inv = 1.0 / static_cast<double>(b);
    LossReport report;
    report.iterations = 1;

    // --- critic step: y = r + gamma * Q'(s', mu'(s'))
    const Eigen::MatrixXd next_action = to_unit_range(target_actor_.forward(batch.next_states));
    const Eigen::RowVectorXd q_next =
        target_critic_.forward(vstack(batch.next_states, next_action)).row(0);
    const Eigen::RowVectorXd y = batch.rewards + cfg_.gamma * q_next;
    report.td_target_mean = y.mean();

    {
        ForwardTrace trace;
        const Eigen::RowVectorXd q =
            critic_.forward(vstack(batch.states, batch.actions), trace).row(0);
        const Eigen::RowVectorXd err = q - y;
        report.critic1 = err.squaredNorm() * batch_inv;
        std::vector<LayerParam> grads;
        critic_.backward(trace, (2.0 * batch_inv) * err, grads);
        clip_grad_norm(grads, cfg_.grad_clip);
        critic_opt_.step(critic_.layers(), grads);
    }

    // --- actor step: maximize mean Q(s, mu(s))
    ForwardTrace actor_trace;
    const Eigen::MatrixXd mu_tanh = actor_.forward(batch.states, actor_trace);
    ForwardTrace critic_trace;
    const Eigen::RowVectorXd q_pi =
        critic_.forward(vstack(batch.states, to_unit_range(mu_tanh)), critic_trace).row(0);
    report.actor = -q_pi.mean();

    std::vector<LayerParam> scratch;
    const Eigen::MatrixXd d_action =
        critic_
            .backward(critic_trace, Eigen::RowVectorXd::Constant(b, -batch_inv), scratch)
            .bottomRows(action_dim_);
    // chain through a = (tanh_out + 1)/2
    std::vector<LayerParam> actor_grads;
    actor_.backward(actor_trace, 0.5 * d_action, actor_grads);
    clip_grad_norm(actor_grads, cfg_.grad_clip);
    actor_opt_.step(actor_.layers(), actor_grads);

    soft_update(target_actor_, actor_, cfg_.tau);
    soft_update(target_critic_, critic_, cfg_.tau);
    return report;
}

LossReport DdpgAgent::update(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
    LossReport total;
    for (int it = 0; it < cfg_.gradient_iterations; ++it) {
        const auto batch = buffer.sample_batch(batch_size, rng);
        if (!batch) {
            throw std::logic_error("DdpgAgent::update: replay buffer smaller than batch size");
        }
        const LossReport r = update_once(*batch);
        total.critic1 += r.critic1;
        total.actor += r.actor;
        total.td_target_mean = r.td_target_mean;
        ++total.iterations;
    }
    const double inv = 1.0 / static_cast<double>(total.iterations);
    total.critic1 *= inv;
    total.actor *= inv;
    return total;
}

nlohmann::json DdpgAgent::checkpoint() const {
    nlohmann::json doc;
    doc["algorithm"] = "ddpg";
    doc["state_dim"] = state_dim_;
    doc["action_dim"] = action_dim_;
    doc["actor"] = actor_.to_json();
    doc["critic"] = critic_.to_json();
    doc["target_actor"] = target_actor_.to_json();
    doc["target_critic"] = target_critic_.to_json();
    return doc;
}

void DdpgAgent::restore(const nlohmann::json& doc) {
    if (doc.at("algorithm").get<std::string>() != "ddpg") {
        throw std::invalid_argument("DdpgAgent::restore: checkpoint is not a ddpg checkpoint");
    }
    if (doc.at("state_dim").get<int>() != state_dim_ ||
        doc.at("action_dim").get<int>() != action_dim_) {
        throw std::invalid_argument("DdpgAgent::restore: dimension mismatch");
    }
    actor_ = Mlp::from_json(doc.at("actor"));
    critic_ = Mlp::from_json(doc.at("critic"));
    target_actor_ = Mlp::from_json(doc.at("target_actor"));
    target_critic_ = Mlp::from_json(doc.at("target_critic"));
}

}  // namespace imvol
