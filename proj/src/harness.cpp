#include "imvol/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "imvol/ddpg.hpp"
#include "imvol/env.hpp"
#include "imvol/replay.hpp"
#include "imvol/rng.hpp"
#include "imvol/sac.hpp"

namespace imvol {

namespace {

// Seed streams per run seed: 0 agent init, 1 training rng (exploration +
// batch sampling), 2 training env, 3 eval env, 4 eval rng. Streams 3/4 are
// untouched by training so every algorithm sees the same eval episodes.
constexpr std::uint64_t kStreamAgentInit = 0;
constexpr std::uint64_t kStreamTrainRng = 1;
constexpr std::uint64_t kStreamTrainEnv = 2;
constexpr std::uint64_t kStreamEvalEnv = 3;
constexpr std::uint64_t kStreamEvalRng = 4;

// Shortest representation that round-trips a double exactly; glibc prints
// infinities as "inf", which strtod parses back.
std::string fmt(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

// Running totals over the (slot, user) samples of one episode.
struct EpisodeAccumulator {
    double reward_sum = 0.0;
    double qoe_sum = 0.0;
    double latency_sum = 0.0;
    double hit_sum = 0.0;
    std::size_t success_count = 0;
    std::size_t samples = 0;

    void add(const SlotResult& slot) {
        reward_sum += slot.outcome.reward;
        for (double q : slot.outcome.qoe) qoe_sum += q;
        for (double t : slot.outcome.t_total) latency_sum += t;
        for (double p : slot.action.phi) hit_sum += p;
        for (std::uint8_t s : slot.outcome.success) success_count += s;
        samples += slot.outcome.qoe.size();
    }

    EpisodeRecord finish(int episode) const {
        const double n = static_cast<double>(samples);
        EpisodeRecord record;
        record.episode = episode;
        record.reward = reward_sum;
        record.mean_qoe = qoe_sum / n;
        record.mean_latency = latency_sum / n;
        record.mean_hit_ratio = hit_sum / n;
        record.success_rate = static_cast<double>(success_count) / n;
        return record;
    }
};

SweepRecord run_sweep_cell(const RunConfig& base, Algorithm algorithm, int users) {
    RunConfig cell = base;
    cell.algorithm = algorithm;
    cell.system.num_users = users;
    cell.seed = base.seed + 1000ull * static_cast<std::uint64_t>(algorithm_index(algorithm)) +
                static_cast<std::uint64_t>(users);
    cell.tcp_port = 0;  // parallel cells must not contend for one fixed port
    resolve_run_config(cell);

    EvalResult eval;
    if (is_learning(algorithm)) {
        TrainResult trained = train(cell);
        eval = evaluate_agent(*trained.agent, cell);
    } else {
        eval = evaluate_baseline(cell);
    }
    return SweepRecord{algorithm, users,          cell.seed,
                       eval.mean_reward, eval.mean_latency, eval.success_rate};
}

}  // namespace

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Sac: return "sac";
        case Algorithm::Ddpg: return "ddpg";
        case Algorithm::Avg: return "avg";
        case Algorithm::CloudAvg: return "cloud-avg";
    }
    throw std::invalid_argument("unknown algorithm value");
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "sac") return Algorithm::Sac;
    if (name == "ddpg") return Algorithm::Ddpg;
    if (name == "avg") return Algorithm::Avg;
    if (name == "cloud-avg") return Algorithm::CloudAvg;
    throw std::invalid_argument("unknown algorithm \"" + name +
                                "\" (expected sac, ddpg, avg, or cloud-avg)");
}

int algorithm_index(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Sac: return 0;
        case Algorithm::Ddpg: return 1;
        case Algorithm::Avg: return 2;
        case Algorithm::CloudAvg: return 3;
    }
    throw std::invalid_argument("unknown algorithm value");
}

bool is_learning(Algorithm algorithm) {
    return algorithm == Algorithm::Sac || algorithm == Algorithm::Ddpg;
}

void RunConfig::validate() const {
    if (episodes < 1) throw std::invalid_argument("episodes must be positive");
    if (updates_per_env_step < 1) {
        throw std::invalid_argument("updates_per_env_step must be positive");
    }
    if (eval_episodes < 1) throw std::invalid_argument("eval_episodes must be positive");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    if (buffer_capacity < batch_size) {
        throw std::invalid_argument("buffer_capacity must be at least batch_size");
    }
    system.validate();
}

RunConfig parse_run_config(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw std::invalid_argument("run config must be a JSON object");
    }
    static constexpr std::array<const char*, 15> kSystemKeys = {
        "num_users",     "b_max_dl",        "b_max_ul",       "f_max",
        "p_max",         "sigma2",          "t_th",           "beta1",
        "backhaul_latency", "gain_range",   "upload_power",   "steps_per_episode",
        "rendering_site", "pose_payload",   "qoe_floor"};

    RunConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "algorithm") {
            cfg.algorithm = algorithm_from_string(value.get<std::string>());
        } else if (key == "episodes") {
            cfg.episodes = value.get<int>();
        } else if (key == "updates_per_env_step") {
            cfg.updates_per_env_step = value.get<int>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "eval_episodes") {
            cfg.eval_episodes = value.get<int>();
        } else if (key == "out_dir") {
            cfg.out_dir = value.get<std::string>();
        } else if (key == "transport") {
            cfg.transport = transport_mode_from_string(value.get<std::string>());
        } else if (key == "tcp_port") {
            cfg.tcp_port = value.get<std::uint16_t>();
        } else if (key == "batch_size") {
            cfg.batch_size = value.get<std::size_t>();
        } else if (key == "buffer_capacity") {
            cfg.buffer_capacity = value.get<std::size_t>();
        } else if (std::find(kSystemKeys.begin(), kSystemKeys.end(), key) == kSystemKeys.end()) {
            throw std::invalid_argument("unknown config key \"" + key + "\"");
        }
    }
    apply_system_config(cfg.system, doc);
    return cfg;
}

void resolve_run_config(RunConfig& cfg) {
    if (cfg.algorithm == Algorithm::Avg) {
        cfg.system.rendering_site = RenderingSite::OCloud;
    } else if (cfg.algorithm == Algorithm::CloudAvg) {
        cfg.system.rendering_site = RenderingSite::Cloud;
    }
    cfg.validate();
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json doc = nlohmann::json::object();
    doc["algorithm"] = to_string(cfg.algorithm);
    doc["episodes"] = cfg.episodes;
    doc["updates_per_env_step"] = cfg.updates_per_env_step;
    doc["seed"] = cfg.seed;
    doc["eval_episodes"] = cfg.eval_episodes;
    doc["out_dir"] = cfg.out_dir;
    doc["transport"] = to_string(cfg.transport);
    doc["tcp_port"] = cfg.tcp_port;
    doc["batch_size"] = cfg.batch_size;
    doc["buffer_capacity"] = cfg.buffer_capacity;
    system_config_to_json(cfg.system, doc);
    return doc;
}

std::unique_ptr<Agent> make_agent(const RunConfig& cfg) {
    const int state_dim = cfg.system.state_dim();
    const int action_dim = cfg.system.action_dim();
    const std::uint64_t init_seed = Rng::derive(cfg.seed, kStreamAgentInit);
    switch (cfg.algorithm) {
        case Algorithm::Sac: {
            SacConfig sac;
            sac.gradient_iterations = cfg.updates_per_env_step;
            return std::make_unique<SacAgent>(state_dim, action_dim, sac, init_seed);
        }
        case Algorithm::Ddpg: {
            DdpgConfig ddpg;
            ddpg.gradient_iterations = cfg.updates_per_env_step;
            return std::make_unique<DdpgAgent>(state_dim, action_dim, ddpg, init_seed);
        }
        default:
            throw std::invalid_argument("make_agent: " + to_string(cfg.algorithm) +
                                        " is not a learning algorithm");
    }
}

TrainResult train(const RunConfig& cfg) {
    cfg.validate();
    if (!is_learning(cfg.algorithm)) {
        throw std::invalid_argument("train: " + to_string(cfg.algorithm) +
                                    " is not a learning algorithm");
    }

    TrainResult result;
    result.agent = make_agent(cfg);
    Rng run_rng(Rng::derive(cfg.seed, kStreamTrainRng));
    BridgeSession session(cfg.system, Rng::derive(cfg.seed, kStreamTrainEnv), cfg.transport,
                          cfg.tcp_port);
    ReplayBuffer buffer(cfg.buffer_capacity);

    result.episodes.reserve(static_cast<std::size_t>(cfg.episodes));
    for (int episode = 0; episode < cfg.episodes; ++episode) {
        const auto start = std::chrono::steady_clock::now();
        session.reset();
        EpisodeAccumulator acc;
        for (int slot = 0; slot < cfg.system.steps_per_episode; ++slot) {
            const SlotResult step = session.run_slot([&](std::span<const UserState> users) {
                return result.agent->select_action(flatten_states(users), true, run_rng);
            });
            if (!step.acked) {
                // Normalized actions always satisfy the budgets; a rejection
                // here means the bridge and environment disagree.
                throw std::logic_error("train: control rejected: " + step.failure_reason);
            }
            buffer.push(Transition{flatten_states(step.reported), step.raw, step.outcome.reward,
                                   flatten_states(session.env().states())});
            acc.add(step);
            if (buffer.size() >= cfg.batch_size) {
                result.agent->update(buffer, cfg.batch_size, run_rng);
            }
        }
        EpisodeRecord record = acc.finish(episode);
        record.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.episodes.push_back(record);
    }
    return result;
}

EvalResult evaluate_source(const RawSource& source, const RunConfig& cfg) {
    cfg.validate();
    BridgeSession session(cfg.system, Rng::derive(cfg.seed, kStreamEvalEnv), cfg.transport,
                          cfg.tcp_port);
    const std::size_t num_users = static_cast<std::size_t>(cfg.system.num_users);

    EvalResult result;
    result.users.resize(num_users);
    std::vector<double> user_qoe(num_users, 0.0);
    std::vector<double> user_latency(num_users, 0.0);
    std::vector<double> user_hit(num_users, 0.0);
    std::vector<std::size_t> user_success(num_users, 0);

    double total_reward = 0.0;
    result.episodes.reserve(static_cast<std::size_t>(cfg.eval_episodes));
    for (int episode = 0; episode < cfg.eval_episodes; ++episode) {
        const auto start = std::chrono::steady_clock::now();
        session.reset();
        EpisodeAccumulator acc;
        for (int slot = 0; slot < cfg.system.steps_per_episode; ++slot) {
            const SlotResult step = session.run_slot(source);
            if (!step.acked) {
                throw std::logic_error("evaluate: control rejected: " + step.failure_reason);
            }
            acc.add(step);
            for (std::size_t u = 0; u < num_users; ++u) {
                user_qoe[u] += step.outcome.qoe[u];
                user_latency[u] += step.outcome.t_total[u];
                user_hit[u] += step.action.phi[u];
                user_success[u] += step.outcome.success[u];
                result.users[u].tier = step.reported[u].tier;
            }
        }
        EpisodeRecord record = acc.finish(episode);
        record.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.episodes.push_back(record);
        total_reward += record.reward;
    }

    const double slots =
        static_cast<double>(cfg.eval_episodes) * static_cast<double>(cfg.system.steps_per_episode);
    double latency_sum = 0.0;
    std::size_t success_sum = 0;
    for (std::size_t u = 0; u < num_users; ++u) {
        UserRecord& row = result.users[u];
        row.user = static_cast<int>(u);
        row.mean_qoe = user_qoe[u] / slots;
        row.mean_latency = user_latency[u] / slots;
        row.mean_hit_ratio = user_hit[u] / slots;
        row.success_rate = static_cast<double>(user_success[u]) / slots;
        latency_sum += user_latency[u];
        success_sum += user_success[u];
    }
    result.mean_reward = total_reward / static_cast<double>(cfg.eval_episodes);
    result.mean_latency = latency_sum / (slots * static_cast<double>(num_users));
    result.success_rate =
        static_cast<double>(success_sum) / (slots * static_cast<double>(num_users));
    return result;
}

EvalResult evaluate_agent(Agent& agent, const RunConfig& cfg) {
    Rng eval_rng(Rng::derive(cfg.seed, kStreamEvalRng));
    return evaluate_source(
        [&](std::span<const UserState> users) {
            return agent.select_action(flatten_states(users), false, eval_rng);
        },
        cfg);
}

EvalResult evaluate_baseline(const RunConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::Avg:
            return evaluate_source(
                [&cfg](std::span<const UserState> users) { return avg_policy(users, cfg.system); },
                cfg);
        case Algorithm::CloudAvg:
            return evaluate_source(
                [&cfg](std::span<const UserState> users) {
                    return cloud_avg_policy(users, cfg.system);
                },
                cfg);
        default:
            throw std::invalid_argument("evaluate_baseline: " + to_string(cfg.algorithm) +
                                        " is a learning algorithm");
    }
}

std::vector<SweepRecord> sweep_users(const RunConfig& base, std::span<const int> user_counts,
                                     std::span<const Algorithm> algorithms) {
    std::vector<std::pair<Algorithm, int>> cells;
    cells.reserve(user_counts.size() * algorithms.size());
    for (Algorithm algorithm : algorithms) {
        for (int users : user_counts) {
            cells.emplace_back(algorithm, users);
        }
    }

    std::vector<SweepRecord> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                rows[i] = run_sweep_cell(base, cells[i].first, cells[i].second);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::min<std::size_t>(
        cells.size(), std::max<unsigned>(1, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

void write_episodes_csv(const std::filesystem::path& path,
                        std::span<const EpisodeRecord> records) {
    std::ofstream out = open_for_write(path);
    out << "episode,reward,mean_qoe,mean_latency,mean_hit_ratio,success_rate\n";
    for (const EpisodeRecord& r : records) {
        out << r.episode << ',' << fmt(r.reward) << ',' << fmt(r.mean_qoe) << ','
            << fmt(r.mean_latency) << ',' << fmt(r.mean_hit_ratio) << ','
            << fmt(r.success_rate) << '\n';
    }
    finish_write(out, path);
}

void write_per_user_csv(const std::filesystem::path& path, std::span<const UserRecord> users) {
    std::ofstream out = open_for_write(path);
    out << "user,tier,mean_qoe,mean_latency,mean_hit_ratio,success_rate\n";
    for (const UserRecord& r : users) {
        out << r.user << ',' << r.tier << ',' << fmt(r.mean_qoe) << ',' << fmt(r.mean_latency)
            << ',' << fmt(r.mean_hit_ratio) << ',' << fmt(r.success_rate) << '\n';
    }
    finish_write(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRecord> rows) {
    std::ofstream out = open_for_write(path);
    out << "algorithm,users,seed,mean_reward,mean_latency,success_rate\n";
    for (const SweepRecord& r : rows) {
        out << to_string(r.algorithm) << ',' << r.users << ',' << r.seed << ','
            << fmt(r.mean_reward) << ',' << fmt(r.mean_latency) << ',' << fmt(r.success_rate)
            << '\n';
    }
    finish_write(out, path);
}

void write_run_json(const std::filesystem::path& path, const RunConfig& cfg) {
    std::ofstream out = open_for_write(path);
    out << run_config_to_json(cfg).dump(2) << '\n';
    finish_write(out, path);
}

void write_checkpoint(const std::filesystem::path& path, const Agent& agent) {
    std::ofstream out = open_for_write(path);
    out << agent.checkpoint().dump(2) << '\n';
    finish_write(out, path);
}

std::unique_ptr<Agent> load_agent(const RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read checkpoint " + path.string());
    }
    const nlohmann::json doc = nlohmann::json::parse(in);
    std::unique_ptr<Agent> agent = make_agent(cfg);
    agent->restore(doc);
    return agent;
}

}  // namespace imvol
