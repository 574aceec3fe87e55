#include "imvol/sac.hpp"

#include <cmath>
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

}  // namespace

SacAgent::SacAgent(int state_dim, int action_dim, SacConfig cfg, std::uint64_t init_seed)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      cfg_(std::move(cfg)),
      actor_(net_sizes(state_dim, cfg_.hidden, 2 * action_dim), Activation::Identity),
      critic1_(net_sizes(state_dim + action_dim, cfg_.hidden, 1), Activation::Identity),
      critic2_(net_sizes(state_dim + action_dim, cfg_.hidden, 1), Activation::Identity),
      alpha_opt_(AdamConfig{cfg_.alpha_lr, 0.9, 0.999, 1e-8}) {
    if (state_dim < 1 || action_dim < 1) {
        throw std::invalid_argument("SacAgent: dimensions must be positive");
    }
    if (!(cfg_.init_alpha > 0.0)) {
        throw std::invalid_argument("SacAgent: init_alpha must be positive");
    }
    target_entropy_ = cfg_.target_entropy.value_or(-static_cast<double>(action_dim));
    log_alpha_ = std::log(cfg_.init_alpha);

    Rng rng(init_seed);
    actor_.init_uniform(rng);
    critic1_.init_uniform(rng);
    critic2_.init_uniform(rng);
    target1_ = critic1_;
    target2_ = critic2_;

    actor_opt_ = AdamState(actor_.layers(), AdamConfig{cfg_.actor_lr, 0.9, 0.999, 1e-8});
    critic1_opt_ = AdamState(critic1_.layers(), AdamConfig{cfg_.critic_lr, 0.9, 0.999, 1e-8});
    critic2_opt_ = AdamState(critic2_.layers(), AdamConfig{cfg_.critic_lr, 0.9, 0.999, 1e-8});
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

void SacAgent::actor_head(const Eigen::MatrixXd& states, ForwardTrace& trace,
                          Eigen::MatrixXd& mean, Eigen::MatrixXd& log_std) const {
    const Eigen::MatrixXd head = actor_.forward(states, trace);
    mean = head.topRows(action_dim_);
    log_std = head.bottomRows(action_dim_);
}

std::vector<double> SacAgent::select_action(const std::vector<double>& state, bool explore,
                                            Rng& rng) {
    if (state.size() != static_cast<std::size_t>(state_dim_)) {
        throw std::domain_error("SacAgent::select_action: state dimension mismatch");
    }
    const Eigen::Map<const Eigen::VectorXd> s(state.data(), state_dim_);
    ForwardTrace trace;
    Eigen::MatrixXd mean, log_std;
    actor_head(s, trace, mean, log_std);
    Eigen::MatrixXd action;
    if (explore) {
        action = gaussian_tanh_sample(mean, log_std, rng).action;
    } else {
        action = squashed_mean(mean);
    }
    return std::vector<double>(action.data(), action.data() + action.size());
}

LossReport SacAgent::update_once(const Batch& batch, Rng& rng) {
    const Eigen::Index b = batch.size();
    if (b < 1) throw std::logic_error("SacAgent::update_once: empty batch");
    const double batch_inv = 1.0 / static_cast<double>(b);
    const double alpha_now = alpha();
    LossReport report;
    report.iterations = 1;

    // --- critic step: y = r + gamma * (min_i Q'_i(s', a') - alpha log pi(a'|s'))
    Eigen::MatrixXd next_mean, next_log_std;
    {
        ForwardTrace trace;
        actor_head(batch.next_states, trace, next_mean, next_log_std);
    }
    const SquashedSample next_sample = gaussian_tanh_sample(next_mean, next_log_std, rng);
    const Eigen::MatrixXd next_sa = vstack(batch.next_states, next_sample.action);
    const Eigen::RowVectorXd q1_next = target1_.forward(next_sa).row(0);
    const Eigen::RowVectorXd q2_next = target2_.forward(next_sa).row(0);
    const Eigen::RowVectorXd q_min_next = q1_next.cwiseMin(q2_next);
    const Eigen::RowVectorXd y =
        batch.rewards + cfg_.gamma * (q_min_next - alpha_now * next_sample.log_prob);
    report.td_target_mean = y.mean();

    const Eigen::MatrixXd sa = vstack(batch.states, batch.actions);
    auto critic_step = [&](Mlp& critic, AdamState& opt) {
        ForwardTrace trace;
        const Eigen::RowVectorXd q = critic.forward(sa, trace).row(0);
        const Eigen::RowVectorXd err = q - y;
        const double loss = err.squaredNorm() * batch_inv;
        std::vector<LayerParam> grads;
        critic.backward(trace, (2.0 * batch_inv) * err, grads);
        clip_grad_norm(grads, cfg_.grad_clip);
        opt.step(critic.layers(), grads);
        return loss;
    };
    report.critic1 = critic_step(critic1_, critic1_opt_);
    report.critic2 = critic_step(critic2_, critic2_opt_);

    // --- actor step: minimize mean(alpha log pi(a~|s) - min_i Q_i(s, a~))
    ForwardTrace actor_trace;
    Eigen::MatrixXd mean, log_std;
    actor_head(batch.states, actor_trace, mean, log_std);
    const SquashedSample sample = gaussian_tanh_sample(mean, log_std, rng);
    const Eigen::MatrixXd sa_pi = vstack(batch.states, sample.action);

    ForwardTrace q1_trace, q2_trace;
    const Eigen::RowVectorXd q1_pi = critic1_.forward(sa_pi, q1_trace).row(0);
    const Eigen::RowVectorXd q2_pi = critic2_.forward(sa_pi, q2_trace).row(0);
    report.actor = (alpha_now * sample.log_prob - q1_pi.cwiseMin(q2_pi)).mean();

    // d(actor loss)/d(a~): route -1/B through whichever critic is the
    // pointwise minimum (ties go to critic 1), keeping its parameters fixed.
    Eigen::RowVectorXd up1 = Eigen::RowVectorXd::Zero(b);
    Eigen::RowVectorXd up2 = Eigen::RowVectorXd::Zero(b);
    for (Eigen::Index j = 0; j < b; ++j) {
        (q1_pi(j) <= q2_pi(j) ? up1(j) : up2(j)) = -batch_inv;
    }
    std::vector<LayerParam> scratch;
    Eigen::MatrixXd d_action = Eigen::MatrixXd::Zero(action_dim_, b);
    if ((up1.array() != 0.0).any()) {
        d_action += critic1_.backward(q1_trace, up1, scratch).bottomRows(action_dim_);
    }
    if ((up2.array() != 0.0).any()) {
        d_action += critic2_.backward(q2_trace, up2, scratch).bottomRows(action_dim_);
    }
    const Eigen::RowVectorXd d_log_prob =
        Eigen::RowVectorXd::Constant(b, alpha_now * batch_inv);
    Eigen::MatrixXd d_mean, d_log_std;
    gaussian_tanh_backward(sample, d_action, d_log_prob, d_mean, d_log_std);
    std::vector<LayerParam> actor_grads;
    actor_.backward(actor_trace, vstack(d_mean, d_log_std), actor_grads);
    clip_grad_norm(actor_grads, cfg_.grad_clip);
    actor_opt_.step(actor_.layers(), actor_grads);

    // --- temperature step: L(alpha) = -alpha * mean(log pi + H_target);
    // with log-space storage dL/d(log alpha) equals the loss itself.
    const double entropy_gap = (sample.log_prob.array() + target_entropy_).mean();
    report.alpha_loss = -alpha_now * entropy_gap;
    alpha_opt_.step(log_alpha_, report.alpha_loss);
    report.alpha = alpha();

    soft_update(target1_, critic1_, cfg_.tau);
    soft_update(target2_, critic2_, cfg_.tau);
    return report;
}

LossReport SacAgent::update(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
    LossReport total;
    for (int it = 0; it < cfg_.gradient_iterations; ++it) {
        const auto batch = buffer.sample_batch(batch_size, rng);
        if (!batch) {
            throw std::logic_error("SacAgent::update: replay buffer smaller than batch size");
        }
        const LossReport r = update_once(*batch, rng);
        total.critic1 += r.critic1;
        total.critic2 += r.critic2;
        total.actor += r.actor;
        total.alpha_loss += r.alpha_loss;
        total.td_target_mean = r.td_target_mean;
        total.alpha = r.alpha;
        ++total.iterations;
    }
    const double inv = 1.0 / static_cast<double>(total.iterations);
    total.critic1 *= inv;
    total.critic2 *= inv;
    total.actor *= inv;
    total.alpha_loss *= inv;
    return total;
}

nlohmann::json SacAgent::checkpoint() const {
    nlohmann::json doc;
    doc["algorithm"] = "sac";
    doc["state_dim"] = state_dim_;
    doc["action_dim"] = action_dim_;
    doc["log_alpha"] = log_alpha_;
    doc["target_entropy"] = target_entropy_;
    doc["actor"] = actor_.to_json();
    doc["critic1"] = critic1_.to_json();
    doc["critic2"] = critic2_.to_json();
    doc["target1"] = target1_.to_json();
    doc["target2"] = target2_.to_json();
    return doc;
}

void SacAgent::restore(const nlohmann::json& doc) {
    if (doc.at("algorithm").get<std::string>() != "sac") {
        throw std::invalid_argument("SacAgent::restore: checkpoint is not a sac checkpoint");
    }
    if (doc.at("state_dim").get<int>() != state_dim_ ||
        doc.at("action_dim").get<int>() != action_dim_) {
        throw std::invalid_argument("SacAgent::restore: dimension mismatch");
    }
    actor_ = Mlp::from_json(doc.at("actor"));
    critic1_ = Mlp::from_json(doc.at("critic1"));
    critic2_ = Mlp::from_json(doc.at("critic2"));
    target1_ = Mlp::from_json(doc.at("target1"));
    target2_ = Mlp::from_json(doc.at("target2"));
    log_alpha_ = doc.at("log_alpha").get<double>();
    target_entropy_ = doc.at("target_entropy").get<double>();
}

}  // namespace imvol
