#include <doctest.h>

#include <vector>

#include "imvol/policies.hpp"

using namespace imvol;

TEST_SUITE("policies.baselines") {
    TEST_CASE("avg policy normalizes to equal budget shares") {
        SystemConfig cfg;
        cfg.num_users = 4;
        const auto states = reset_users(cfg, 1u);
        const auto raw = avg_policy(states, cfg);
        REQUIRE(raw.size() == 20);
        const AllocationAction action = normalize_action(raw, cfg);
        for (int u = 0; u < 4; ++u) {
            CHECK(action.b_dl[static_cast<std::size_t>(u)] ==
                  doctest::Approx(10.0).epsilon(1e-6));
            CHECK(action.b_ul[static_cast<std::size_t>(u)] ==
                  doctest::Approx(10.0).epsilon(1e-6));
            CHECK(action.f[static_cast<std::size_t>(u)] == doctest::Approx(2.5).epsilon(1e-6));
            CHECK(action.p_dl[static_cast<std::size_t>(u)] ==
                  doctest::Approx(2.5).epsilon(1e-6));
            CHECK(action.phi[static_cast<std::size_t>(u)] == 1.0);
        }
    }

    TEST_CASE("two-user compute split") {
        SystemConfig cfg;
        cfg.num_users = 2;
        const auto states = reset_users(cfg, 2u);
        const AllocationAction action = normalize_action(avg_policy(states, cfg), cfg);
        CHECK(action.f[0] == doctest::Approx(5.0).epsilon(1e-6));
        CHECK(action.f[1] == doctest::Approx(5.0).epsilon(1e-6));
    }

    TEST_CASE("baselines are state independent") {
        SystemConfig cfg;
        cfg.num_users = 8;
        const auto states_a = reset_users(cfg, 10u);
        const auto states_b = reset_users(cfg, 77u);
        CHECK(avg_policy(states_a, cfg) == avg_policy(states_b, cfg));
        CHECK(cloud_avg_policy(states_a, cfg) == avg_policy(states_a, cfg));
    }

    TEST_CASE("policy interface returns the same vectors") {
        SystemConfig cfg;
        cfg.num_users = 3;
        const auto states = reset_users(cfg, 4u);
        Rng rng(0);
        AvgPolicy avg;
        CloudAvgPolicy cloud;
        CHECK(avg.act(states, cfg, true, rng) == avg_policy(states, cfg));
        CHECK(cloud.act(states, cfg, false, rng) == cloud_avg_policy(states, cfg));
        CHECK(avg.name() == "avg");
        CHECK(cloud.name() == "cloud-avg");
    }

    TEST_CASE("user-count mismatch is rejected") {
        SystemConfig cfg;
        cfg.num_users = 4;
        const auto states = reset_users(cfg, 5u);
        SystemConfig wrong = cfg;
        wrong.num_users = 5;
        CHECK_THROWS_AS(avg_policy(states, wrong), std::domain_error);
    }

    TEST_CASE("equal gains give equal latency within a tier under avg") {
        SystemConfig cfg;
        cfg.num_users = 8;
        auto states = reset_users(cfg, 6u);
        for (auto& s : states) s.gain = 1.3;
        const StepOutcome out =
            compute_outcome(states, normalize_action(avg_policy(states, cfg), cfg), cfg);
        CHECK(out.t_total[0] == doctest::Approx(out.t_total[4]).epsilon(1e-12));
        CHECK(out.t_total[1] == doctest::Approx(out.t_total[5]).epsilon(1e-12));
        // higher tiers wait longer under equal shares
        CHECK(out.t_total[0] < out.t_total[1]);
        CHECK(out.t_total[1] < out.t_total[2]);
        CHECK(out.t_total[2] < out.t_total[3]);
    }
}
