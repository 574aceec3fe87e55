#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "imvol/config.hpp"
#include "imvol/env.hpp"
#include "imvol/rng.hpp"

namespace imvol {

// A policy maps per-user states to a raw action vector in [0,1]^(5U); the
// environment side turns that into budget-feasible allocations via
// normalize_action. `explore` requests stochastic behaviour where supported;
// baselines ignore it.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::vector<double> act(std::span<const UserState> states,
                                    const SystemConfig& cfg, bool explore, Rng& rng) = 0;
    virtual std::string name() const = 0;
};

/// Uniform baseline: equal raw shares in every resource group, full hit
/// ratio. State-independent; normalize_action turns it into budget/U each.
std::vector<double> avg_policy(std::span<const UserState> states, const SystemConfig& cfg);

/// Identical raw output to avg_policy; the harness evaluates it with
/// rendering_site = Cloud so every frame pays the 2x backhaul detour.
std::vector<double> cloud_avg_policy(std::span<const UserState> states, const SystemConfig& cfg);

class AvgPolicy final : public Policy {
public:
    std::vector<double> act(std::span<const UserState> states, const SystemConfig& cfg,
                            bool explore, Rng& rng) override;
    std::string name() const override { return "avg"; }
};

class CloudAvgPolicy final : public Policy {
public:
    std::vector<double> act(std::span<const UserState> states, const SystemConfig& cfg,
                            bool explore, Rng& rng) override;
    std::string name() const override { return "cloud-avg"; }
};

}  // namespace imvol
