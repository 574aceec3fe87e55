#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "imvol/replay.hpp"
#include "imvol/rng.hpp"

namespace imvol {

/// Diagnostics from one update call (averaged over its inner iterations).
struct LossReport {
    double critic1 = 0.0;
    double critic2 = 0.0;         // zero for single-critic agents
    double actor = 0.0;
    double alpha_loss = 0.0;      // zero when the temperature is not learned
    double alpha = 0.0;           // current temperature after the update
    double td_target_mean = 0.0;  // mean of y over the last sampled batch
    int iterations = 0;
};

// Learning policy over flattened state vectors. All randomness (exploration
// noise, batch sampling, reparameterized draws) flows through the caller's
// Rng so runs are reproducible end to end.
class Agent {
public:
    virtual ~Agent() = default;

    virtual std::vector<double> select_action(const std::vector<double>& state, bool explore,
                                              Rng& rng) = 0;

    /// One update: `gradient_iterations` inner steps, each sampling a fresh
    /// batch of `batch_size` from `buffer`. Throws std::logic_error when the
    /// buffer holds fewer than batch_size transitions.
    virtual LossReport update(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) = 0;

    virtual nlohmann::json checkpoint() const = 0;
    virtual void restore(const nlohmann::json& doc) = 0;
    virtual std::string name() const = 0;
};

}  // namespace imvol
