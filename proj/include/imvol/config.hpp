#pragma once

#include <array>
#include <string>

#include <json.hpp>

namespace imvol {

/// Where per-frame rendering runs. Cloud rendering adds backhaul latency in
/// both directions (request forward, frame return).
enum class RenderingSite { OCloud, Cloud };

std::string to_string(RenderingSite site);
RenderingSite rendering_site_from_string(const std::string& name);

// System-wide model parameters. Units are abstract but internally consistent:
// demands 10..40, bandwidth budgets 40, power/compute budgets 10, noise 1.
// The documentation maps them onto MHz / W / cycles; the math never does.
struct SystemConfig {
    int num_users = 8;
    double b_max_dl = 40.0;       // total download bandwidth budget
    double b_max_ul = 40.0;       // total upload bandwidth budget
    double f_max = 10.0;          // total compute budget
    double p_max = 10.0;          // total download transmit power budget
    double sigma2 = 1.0;          // noise power
    double t_th = 5.0;            // per-frame delay threshold
    double beta1 = 0.5;           // fairness weight in the reward
    double backhaul_latency = 0.005;  // one-way RAN<->cloud latency
    std::array<double, 2> gain_range{0.5, 2.0};
    double upload_power = 1.0;    // fixed per-user upload power
    int steps_per_episode = 20;
    RenderingSite rendering_site = RenderingSite::OCloud;
    double pose_payload = 0.1;    // per-frame pose/status upload size A^U
    double qoe_floor = -1.0;      // QoE assigned to infeasible slots

    int state_dim() const { return 5 * num_users; }
    int action_dim() const { return 5 * num_users; }

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Applies keys from a flat JSON object onto `cfg`. Unknown keys that are not
/// run-level keys are rejected by the caller; this only consumes system keys.
void apply_system_config(SystemConfig& cfg, const nlohmann::json& doc);
void system_config_to_json(const SystemConfig& cfg, nlohmann::json& out);

}  // namespace imvol
