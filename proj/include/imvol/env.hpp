#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imvol/config.hpp"
#include "imvol/rng.hpp"

namespace imvol {

/// Full-frame compute/download demand per resolution tier (480P..2K).
inline constexpr std::array<double, 4> kTierDemand{10.0, 20.0, 30.0, 40.0};

// Per-user observable state for one slot. Flattened per user as
// [gain, a_ul, a_comp, a_dl, p_ul]; see flatten_states().
struct UserState {
    double gain = 1.0;    // channel gain g_u(t)
    double a_ul = 0.1;    // pose/status upload size A_u^U
    double a_comp = 10.0; // full-frame compute demand A_u^C
    double a_dl = 10.0;   // full-frame download size A_u^D
    double p_ul = 1.0;    // upload power p_u^U
    int tier = 0;         // 0:480P 1:720P 2:1080P 3:2K
};

// Per-user allocation for one slot. Raw policy outputs live in [0,1]^(5U),
// laid out group-major: [b_ul x U][f x U][b_dl x U][p_dl x U][phi x U];
// normalize_action() maps that vector onto the budgets below.
struct AllocationAction {
    std::vector<double> b_ul;  // upload bandwidth per user
    std::vector<double> f;     // compute frequency per user
    std::vector<double> b_dl;  // download bandwidth per user
    std::vector<double> p_dl;  // download transmit power per user
    std::vector<double> phi;   // content-hit ratio per user, in [0,1]

    std::size_t num_users() const { return phi.size(); }
};

/// One user's slice of an AllocationAction.
struct UserAllocation {
    double b_ul = 0.0;
    double f = 0.0;
    double b_dl = 0.0;
    double p_dl = 0.0;
    double phi = 0.0;
};

struct LatencyBreakdown {
    double t_ul = 0.0;
    double t_comp = 0.0;
    double t_dl = 0.0;
    double t_total = 0.0;  // +inf marks an infeasible slot
};

struct StepOutcome {
    std::vector<double> t_ul, t_comp, t_dl, t_total;
    std::vector<double> qoe;
    std::vector<std::uint8_t> success;  // t_total <= t_th
    double reward = 0.0;
};

/// Shannon-capacity download rate b * log2(1 + p*g/sigma2).
/// Returns 0 when b or p is 0. Throws std::domain_error on non-finite or
/// negative inputs, gain <= 0, or sigma2 <= 0.
double download_rate(double b_dl, double p_dl, double gain, double sigma2);

/// Upload-direction counterpart of download_rate.
double upload_rate(double b_ul, double p_ul, double gain, double sigma2);

/// Per-frame latency decomposition for one user:
///   t_ul = a_ul / R_ul, t_comp = a_comp*phi / f, t_dl = a_dl*phi / R_dl,
/// plus 2*backhaul_latency on the total under cloud rendering. A zero rate
/// (or zero compute) against positive demand yields an infinite component
/// rather than an error; phi = 0 zeroes both content terms.
LatencyBreakdown frame_latency(const UserState& user, const UserAllocation& alloc,
                               const SystemConfig& cfg);

/// Weber-Fechner QoE: (1 - t_total/t_th) * ln(1 + phi). Returns qoe_floor for
/// the infeasible sentinel (non-finite t_total). Throws std::domain_error for
/// phi outside [0,1] or t_th <= 0.
double qoe_score(double t_total, double phi, double t_th, double qoe_floor = -1.0);

/// Coefficient of variation: population standard deviation over |mean|+1e-8.
/// Throws std::domain_error on an empty list.
double coefficient_of_variation(std::span<const double> values);

/// System reward: sum of per-user QoE minus beta1 * CoV of per-user QoE.
double system_reward(std::span<const double> qoes, double beta1);

/// Maps a raw policy vector in [0,1]^(5U) onto the budget constraints:
/// every budget group becomes budget * raw / (sum(raw) + 1e-8) (equal shares
/// when the group is all zero); phi passes through unchanged.
AllocationAction normalize_action(std::span<const double> raw, const SystemConfig& cfg);

/// Checks an action against the budgets and the phi range. Returns a human-
/// readable violation reason, or nullopt when the action is admissible.
std::optional<std::string> validate_action(const AllocationAction& action,
                                           const SystemConfig& cfg);

/// Samples the per-user states for an episode: tier = u mod 4 with demands
/// from kTierDemand, gain uniform over gain_range, fixed pose payload and
/// upload power.
std::vector<UserState> reset_users(const SystemConfig& cfg, Rng& rng);
std::vector<UserState> reset_users(const SystemConfig& cfg, std::uint64_t seed);

/// Latency/QoE/reward for one slot; pure in (states, action, config).
StepOutcome compute_outcome(std::span<const UserState> states,
                            const AllocationAction& action, const SystemConfig& cfg);

/// Resamples channel gains, keeping demands, tier, and upload power fixed.
std::vector<UserState> advance_states(std::span<const UserState> states,
                                      const SystemConfig& cfg, Rng& rng);

/// One environment transition. Validates the action (std::domain_error on
/// violation), computes the outcome, then resamples gains for the next slot.
std::pair<std::vector<UserState>, StepOutcome> step(std::span<const UserState> states,
                                                    const AllocationAction& action,
                                                    const SystemConfig& cfg, Rng& rng);

/// RL state vector, 5 entries per user in the order [gain, a_ul, a_comp, a_dl, p_ul].
std::vector<double> flatten_states(std::span<const UserState> states);

// Owns the per-episode user states and the gain-resampling stream.
class Environment {
public:
    Environment(SystemConfig cfg, std::uint64_t seed);

    const std::vector<UserState>& reset();
    StepOutcome step(const AllocationAction& action);

    const std::vector<UserState>& states() const { return states_; }
    const SystemConfig& config() const { return cfg_; }

private:
    SystemConfig cfg_;
    Rng rng_;
    std::vector<UserState> states_;
};

}  // namespace imvol
