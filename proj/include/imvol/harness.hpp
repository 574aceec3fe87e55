#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "imvol/agent.hpp"
#include "imvol/bridge.hpp"
#include "imvol/config.hpp"
#include "imvol/policies.hpp"
#include "imvol/transport.hpp"

namespace imvol {

enum class Algorithm { Sac, Ddpg, Avg, CloudAvg };

std::string to_string(Algorithm algorithm);
/// Accepts "sac", "ddpg", "avg", "cloud-avg"; throws std::invalid_argument.
Algorithm algorithm_from_string(const std::string& name);
/// Stable index (sac 0, ddpg 1, avg 2, cloud-avg 3) used for sweep seeds.
int algorithm_index(Algorithm algorithm);
bool is_learning(Algorithm algorithm);

// Fully describes one run. The flat JSON config mirrors these field names
// plus every SystemConfig field; CLI flags override file values.
struct RunConfig {
    Algorithm algorithm = Algorithm::Sac;
    int episodes = 200;            // training episodes
    int updates_per_env_step = 10; // gradient iterations per environment step
    std::uint64_t seed = 0;
    int eval_episodes = 20;
    std::string out_dir;
    SystemConfig system;           // includes steps_per_episode and num_users
    TransportMode transport = TransportMode::Inproc;
    std::uint16_t tcp_port = 0;    // 0 = ephemeral in tcp-loopback mode
    std::size_t batch_size = 128;
    std::size_t buffer_capacity = 10000;

    void validate() const;
};

/// Parses a flat JSON object onto the defaults. Unknown keys are rejected
/// with std::invalid_argument naming the key.
RunConfig parse_run_config(const nlohmann::json& doc);

/// Pins the rendering site implied by the baseline choice (avg -> ocloud,
/// cloud-avg -> cloud; learned algorithms keep the configured site) and
/// validates. Call once after all overrides are applied.
void resolve_run_config(RunConfig& cfg);

/// The fully-resolved flat config (all defaults included) for provenance.
nlohmann::json run_config_to_json(const RunConfig& cfg);

// One training or evaluation episode's aggregate metrics. Wall clock is kept
// for callers but never written to the metrics files, which must be
// byte-identical across reruns.
struct EpisodeRecord {
    int episode = 0;
    double reward = 0.0;          // sum of per-slot system rewards
    double mean_qoe = 0.0;        // over slots x users
    double mean_latency = 0.0;    // over slots x users; +inf if any slot was infeasible
    double mean_hit_ratio = 0.0;  // over slots x users
    double success_rate = 0.0;    // fraction of (slot, user) pairs within the deadline
    double wall_clock_seconds = 0.0;
};

/// Per-user aggregates over a whole evaluation.
struct UserRecord {
    int user = 0;
    int tier = 0;
    double mean_qoe = 0.0;
    double mean_latency = 0.0;
    double mean_hit_ratio = 0.0;
    double success_rate = 0.0;
};

struct TrainResult {
    std::vector<EpisodeRecord> episodes;
    std::unique_ptr<Agent> agent;
};

struct EvalResult {
    std::vector<EpisodeRecord> episodes;  // one per evaluation episode
    std::vector<UserRecord> users;
    double mean_reward = 0.0;   // mean of per-episode reward sums
    double mean_latency = 0.0;  // over all slots x users
    double success_rate = 0.0;  // over all slots x users
};

/// Maps reported user states to the raw action vector for this slot.
using RawSource = std::function<std::vector<double>(std::span<const UserState>)>;

/// Training loop for sac/ddpg (std::invalid_argument otherwise). Every action
/// reaches the environment through the e2 bridge; transitions store the raw
/// pre-normalization action; updates begin once the replay buffer holds at
/// least batch_size transitions.
TrainResult train(const RunConfig& cfg);

/// Deterministic-action evaluation of an arbitrary raw-action source over
/// eval_episodes fresh episodes, driven through the e2 bridge.
EvalResult evaluate_source(const RawSource& source, const RunConfig& cfg);

/// Evaluation of a trained agent (explore = false).
EvalResult evaluate_agent(Agent& agent, const RunConfig& cfg);

/// Evaluation of the baseline matching cfg.algorithm (avg or cloud-avg).
EvalResult evaluate_baseline(const RunConfig& cfg);

/// Fresh agent for a learning algorithm: network shapes per algorithm
/// defaults, gradient iterations from the run config, parameters initialized
/// from stream 0 of cfg.seed.
std::unique_ptr<Agent> make_agent(const RunConfig& cfg);

/// One sweep cell's summary row.
struct SweepRecord {
    Algorithm algorithm = Algorithm::Sac;
    int users = 0;
    std::uint64_t seed = 0;
    double mean_reward = 0.0;
    double mean_latency = 0.0;
    double success_rate = 0.0;
};

/// Trains (learning algorithms) and evaluates every (algorithm, user-count)
/// cell with cell seed = base seed + 1000 * algorithm_index + U. Cells are
/// independent and run on parallel workers; the row order is always
/// (algorithm-major, then user count).
std::vector<SweepRecord> sweep_users(const RunConfig& base, std::span<const int> user_counts,
                                     std::span<const Algorithm> algorithms);

// ---- metrics files -------------------------------------------------------

/// episodes.csv: `episode,reward,mean_qoe,mean_latency,mean_hit_ratio,success_rate`.
void write_episodes_csv(const std::filesystem::path& path,
                        std::span<const EpisodeRecord> records);

/// per_user.csv: `user,tier,mean_qoe,mean_latency,mean_hit_ratio,success_rate`.
void write_per_user_csv(const std::filesystem::path& path, std::span<const UserRecord> users);

/// sweep.csv: `algorithm,users,seed,mean_reward,mean_latency,success_rate`.
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRecord> rows);

/// run.json: the fully-resolved config, pretty-printed with sorted keys.
void write_run_json(const std::filesystem::path& path, const RunConfig& cfg);

/// checkpoint.json for a trained agent; load_agent reconstructs and restores.
void write_checkpoint(const std::filesystem::path& path, const Agent& agent);
std::unique_ptr<Agent> load_agent(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace imvol
