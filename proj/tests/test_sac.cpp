#include <doctest.h>

#include <cmath>
#include <vector>

#include "imvol/sac.hpp"

using namespace imvol;

namespace {

// Plain dense forward over copied layer parameters, written without
// Mlp::forward so the loss oracle is an independent evaluation.
Eigen::VectorXd dense_forward(const std::vector<LayerParam>& layers, Eigen::VectorXd x) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        x = layers[l].w * x + layers[l].b;
        if (l + 1 < layers.size()) x = x.cwiseMax(0.0);
    }
    return x;
}

Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() + b.size());
    out << a, b;
    return out;
}

std::vector<LayerParam> copy_layers(const Mlp& net) { return net.layers(); }

struct ScalarSquash {
    double action;
    double log_prob;
};

// One-dimensional squashed-Gaussian draw evaluated from first principles.
ScalarSquash squash_oracle(double mean, double log_std, double noise) {
    const double clamped = std::min(std::max(log_std, -20.0), 2.0);
    const double sigma = std::exp(clamped);
    const double u = std::tanh(mean + sigma * noise);
    const double log2pi = std::log(2.0 * 3.14159265358979323846);
    ScalarSquash out;
    out.action = (u + 1.0) / 2.0;
    out.log_prob = -0.5 * noise * noise - clamped - 0.5 * log2pi -
                   std::log(1.0 - u * u + 1e-6) + std::log(2.0);
    return out;
}

Batch single_transition_batch() {
    Batch batch;
    batch.states = Eigen::MatrixXd(2, 1);
    batch.states << 0.4, -0.2;
    batch.actions = Eigen::MatrixXd(1, 1);
    batch.actions << 0.6;
    batch.rewards = Eigen::RowVectorXd(1);
    batch.rewards << 0.5;
    batch.next_states = Eigen::MatrixXd(2, 1);
    batch.next_states << 0.1, 0.3;
    return batch;
}

SacConfig tiny_config() {
    SacConfig cfg;
    cfg.hidden = {3};
    return cfg;
}

}  // namespace

TEST_SUITE("sac.select_action") {
    TEST_CASE("zero actor head gives the midpoint action") {
        SacAgent agent(4, 2, tiny_config(), 1);
        agent.actor().zero();
        Rng rng(2);
        const auto a = agent.select_action({0.1, 0.2, 0.3, 0.4}, false, rng);
        REQUIRE(a.size() == 2);
        CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(a[1] == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("actions stay inside the unit interval") {
        SacAgent agent(3, 2, tiny_config(), 3);
        Rng rng(4);
        for (int i = 0; i < 100; ++i) {
            const auto a = agent.select_action({1.0, -2.0, 0.5}, true, rng);
            for (double v : a) {
                CHECK(v > 0.0);
                CHECK(v < 1.0);
            }
        }
    }

    TEST_CASE("fixed seeds reproduce the exploration stream") {
        SacAgent agent(2, 1, tiny_config(), 5);
        Rng rng_a(6), rng_b(6);
        for (int i = 0; i < 10; ++i) {
            CHECK(agent.select_action({0.1, 0.9}, true, rng_a) ==
                  agent.select_action({0.1, 0.9}, true, rng_b));
        }
    }

    TEST_CASE("state dimension is checked") {
        SacAgent agent(2, 1, tiny_config(), 7);
        Rng rng(8);
        CHECK_THROWS_AS(agent.select_action({0.1}, false, rng), std::domain_error);
    }
}

TEST_SUITE("sac.update") {
    TEST_CASE("gamma 0 with zero critics regresses to the reward") {
        SacConfig cfg = tiny_config();
        cfg.gamma = 0.0;
        SacAgent agent(2, 1, cfg, 9);
        agent.critic1().zero();
        agent.critic2().zero();
        Batch batch = single_transition_batch();
        batch.rewards << 1.0;
        Rng rng(10);
        const LossReport report = agent.update_once(batch, rng);
        CHECK(report.td_target_mean == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(report.critic1 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(report.critic2 == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("single-transition losses match a direct equation evaluation") {
        SacConfig cfg = tiny_config();
        cfg.critic_lr = 0.0;  // freeze critics so the actor oracle sees them unchanged
        SacAgent agent(2, 1, cfg, 11);
        const Batch batch = single_transition_batch();

        // snapshot every parameter before the update
        const auto actor_params = copy_layers(agent.actor());
        const auto critic1_params = copy_layers(agent.critic1());
        const auto critic2_params = copy_layers(agent.critic2());
        const auto target1_params = copy_layers(agent.target1());
        const auto target2_params = copy_layers(agent.target2());
        const double alpha0 = agent.alpha();
        const double h_target = agent.target_entropy();

        // the update draws noise for a' first, then for the actor's sample
        Rng noise_probe(12);
        const double noise_next = noise_probe.normal();
        const double noise_cur = noise_probe.normal();

        Rng rng(12);
        const LossReport report = agent.update_once(batch, rng);

        // --- TD target: y = r + gamma (min Q'(s',a') - alpha log pi(a'|s'))
        const Eigen::VectorXd head_next =
            dense_forward(actor_params, batch.next_states.col(0));
        const ScalarSquash next = squash_oracle(head_next(0), head_next(1), noise_next);
        const Eigen::VectorXd sa_next =
            concat(batch.next_states.col(0), Eigen::VectorXd::Constant(1, next.action));
        const double q1n = dense_forward(target1_params, sa_next)(0);
        const double q2n = dense_forward(target2_params, sa_next)(0);
        const double y =
            0.5 + cfg.gamma * (std::min(q1n, q2n) - alpha0 * next.log_prob);
        CHECK(report.td_target_mean == doctest::Approx(y).epsilon(1e-6));

        // --- critic losses: (Q_i(s,a) - y)^2 on the pre-update parameters
        const Eigen::VectorXd sa = concat(batch.states.col(0), batch.actions.col(0));
        const double q1 = dense_forward(critic1_params, sa)(0);
        const double q2 = dense_forward(critic2_params, sa)(0);
        CHECK(report.critic1 == doctest::Approx((q1 - y) * (q1 - y)).epsilon(1e-6));
        CHECK(report.critic2 == doctest::Approx((q2 - y) * (q2 - y)).epsilon(1e-6));

        // --- actor loss: alpha log pi(a~|s) - min Q(s,a~), frozen critics
        const Eigen::VectorXd head = dense_forward(actor_params, batch.states.col(0));
        const ScalarSquash cur = squash_oracle(head(0), head(1), noise_cur);
        const Eigen::VectorXd sa_pi =
            concat(batch.states.col(0), Eigen::VectorXd::Constant(1, cur.action));
        const double q1_pi = dense_forward(critic1_params, sa_pi)(0);
        const double q2_pi = dense_forward(critic2_params, sa_pi)(0);
        const double actor_loss = alpha0 * cur.log_prob - std::min(q1_pi, q2_pi);
        CHECK(report.actor == doctest::Approx(actor_loss).epsilon(1e-6));

        // --- temperature loss: -alpha (log pi + H_target)
        const double alpha_loss = -alpha0 * (cur.log_prob + h_target);
        CHECK(report.alpha_loss == doctest::Approx(alpha_loss).epsilon(1e-6));
    }

    TEST_CASE("targets take one polyak step per iteration") {
        SacConfig cfg = tiny_config();
        SacAgent agent(2, 1, cfg, 13);
        const auto old_target = copy_layers(agent.target1());
        Rng rng(14);
        agent.update_once(single_transition_batch(), rng);
        const auto& critic_now = agent.critic1().layers();
        const auto& target_now = agent.target1().layers();
        for (std::size_t l = 0; l < target_now.size(); ++l) {
            const Eigen::MatrixXd expected =
                0.995 * old_target[l].w + 0.005 * critic_now[l].w;
            CHECK((target_now[l].w - expected).cwiseAbs().maxCoeff() < 1e-15);
            const Eigen::VectorXd expected_b =
                0.995 * old_target[l].b + 0.005 * critic_now[l].b;
            CHECK((target_now[l].b - expected_b).cwiseAbs().maxCoeff() < 1e-15);
        }
    }

    TEST_CASE("temperature stays positive and losses stay finite") {
        SacConfig cfg = tiny_config();
        cfg.gradient_iterations = 2;
        SacAgent agent(2, 1, cfg, 15);
        ReplayBuffer buffer(256);
        Rng rng(16);
        for (int i = 0; i < 64; ++i) {
            buffer.push(Transition{{rng.uniform(), rng.uniform()},
                                   {rng.uniform()},
                                   rng.uniform(-1.0, 1.0),
                                   {rng.uniform(), rng.uniform()}});
        }
        for (int round = 0; round < 25; ++round) {
            const LossReport r = agent.update(buffer, 32, rng);
            CHECK(agent.alpha() > 0.0);
            CHECK(std::isfinite(r.critic1));
            CHECK(std::isfinite(r.critic2));
            CHECK(std::isfinite(r.actor));
            CHECK(std::isfinite(r.alpha_loss));
            CHECK(r.iterations == 2);
        }
    }

    TEST_CASE("undersized buffer is refused") {
        SacAgent agent(2, 1, tiny_config(), 17);
        ReplayBuffer buffer(16);
        buffer.push(Transition{{0.0, 0.0}, {0.5}, 0.0, {0.0, 0.0}});
        Rng rng(18);
        CHECK_THROWS_AS(agent.update(buffer, 2, rng), std::logic_error);
    }

    TEST_CASE("equal seeds give identical loss traces") {
        auto run = [](std::uint64_t seed) {
            SacConfig cfg = tiny_config();
            cfg.gradient_iterations = 3;
            SacAgent agent(2, 1, cfg, seed);
            ReplayBuffer buffer(64);
            Rng rng(seed + 100);
            for (int i = 0; i < 16; ++i) {
                buffer.push(Transition{{rng.uniform(), rng.uniform()},
                                       {rng.uniform()},
                                       rng.uniform(),
                                       {rng.uniform(), rng.uniform()}});
            }
            std::vector<double> trace;
            for (int round = 0; round < 5; ++round) {
                const LossReport r = agent.update(buffer, 8, rng);
                trace.push_back(r.critic1);
                trace.push_back(r.actor);
                trace.push_back(r.alpha);
            }
            return trace;
        };
        CHECK(run(21) == run(21));
    }
}

TEST_SUITE("sac.checkpoint") {
    TEST_CASE("round trip restores behaviour exactly") {
        SacConfig cfg = tiny_config();
        SacAgent agent(2, 1, cfg, 19);
        ReplayBuffer buffer(64);
        Rng rng(20);
        for (int i = 0; i < 16; ++i) {
            buffer.push(Transition{{rng.uniform(), rng.uniform()},
                                   {rng.uniform()},
                                   rng.uniform(),
                                   {rng.uniform(), rng.uniform()}});
        }
        agent.update(buffer, 8, rng);

        const nlohmann::json doc = agent.checkpoint();
        SacAgent restored(2, 1, cfg, 999);
        restored.restore(doc);
        CHECK(restored.alpha() == agent.alpha());
        Rng rng_a(1), rng_b(1);
        CHECK(agent.select_action({0.3, 0.7}, true, rng_a) ==
              restored.select_action({0.3, 0.7}, true, rng_b));
        CHECK(agent.select_action({0.3, 0.7}, false, rng_a) ==
              restored.select_action({0.3, 0.7}, false, rng_b));
    }

    TEST_CASE("mismatched checkpoints are rejected") {
        SacAgent agent(2, 1, tiny_config(), 22);
        nlohmann::json doc = agent.checkpoint();
        doc["algorithm"] = "ddpg";
        CHECK_THROWS_AS(agent.restore(doc), std::invalid_argument);
        nlohmann::json wrong_dim = agent.checkpoint();
        wrong_dim["state_dim"] = 3;
        CHECK_THROWS_AS(agent.restore(wrong_dim), std::invalid_argument);
    }
}
