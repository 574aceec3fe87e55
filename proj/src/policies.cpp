#include "imvol/policies.hpp"

#include <stdexcept>

namespace imvol {

namespace {

std::vector<double> uniform_raw(std::span<const UserState> states, const SystemConfig& cfg) {
    const std::size_t u = static_cast<std::size_t>(cfg.num_users);
    if (states.size() != u) {
        throw std::domain_error("baseline policy: state count does not match config");
    }
    // Equal shares in each of the four resource groups (any constant > 0
    // normalizes to budget/U), full hit ratio in the phi group.
    std::vector<double> raw(5 * u, 0.5);
    for (std::size_t i = 4 * u; i < 5 * u; ++i) raw[i] = 1.0;
    return raw;
}

}  // namespace

std::vector<double> avg_policy(std::span<const UserState> states, const SystemConfig& cfg) {
    return uniform_raw(states, cfg);
}

std::vector<double> cloud_avg_policy(std::span<const UserState> states, const SystemConfig& cfg) {
    return uniform_raw(states, cfg);
}

std::vector<double> AvgPolicy::act(std::span<const UserState> states, const SystemConfig& cfg,
                                   bool /*explore*/, Rng& /*rng*/) {
    return avg_policy(states, cfg);
}

std::vector<double> CloudAvgPolicy::act(std::span<const UserState> states,
                                        const SystemConfig& cfg, bool /*explore*/,
                                        Rng& /*rng*/) {
    return cloud_avg_policy(states, cfg);
}

}  // namespace imvol
