// imvol: train, evaluate, and sweep resource-allocation policies for
// multiuser immersive volumetric video sessions.
//
//   imvol train --algo sac        --config cfg.json --seed 1 --out runs/sac1
//   imvol eval  --algo avg        --config cfg.json --seed 1 --out runs/avg1
//   imvol eval  --algo sac        --config cfg.json --seed 1 --out runs/e1 \
//               --checkpoint runs/sac1/checkpoint.json
//   imvol sweep --config cfg.json --seed 1 --out runs/sweep [--users 2,4,8,16]
//
// train writes episodes.csv (training curve), per_user.csv (post-training
// evaluation), run.json, and checkpoint.json. eval writes episodes.csv (one
// row per evaluation episode), per_user.csv, and run.json. sweep writes
// sweep.csv and run.json. Identical config+seed reproduce identical files.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imvol/harness.hpp"

namespace fs = std::filesystem;
using namespace imvol;

namespace {

struct CommandOpts {
    std::string algo;
    std::string config_path;
    std::string out_dir;
    std::string users;
    std::string transport;
    std::string checkpoint;
    std::uint64_t seed = 0;
    std::uint16_t tcp_port = 0;
    CLI::Option* algo_opt = nullptr;
    CLI::Option* users_opt = nullptr;
    CLI::Option* transport_opt = nullptr;
    CLI::Option* tcp_port_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommandOpts& opts, bool algo_required) {
    opts.algo_opt = cmd->add_option("--algo", opts.algo, "Algorithm: sac, ddpg, avg, cloud-avg");
    if (algo_required) opts.algo_opt->required();
    cmd->add_option("--config", opts.config_path, "Flat JSON config file")->required();
    cmd->add_option("--seed", opts.seed, "Run seed")->required();
    cmd->add_option("--out", opts.out_dir, "Output directory for metrics files")->required();
    opts.users_opt = cmd->add_option("--users", opts.users, "Comma-separated user counts");
    opts.transport_opt =
        cmd->add_option("--transport", opts.transport, "Bridge transport: inproc, tcp-loopback");
    opts.tcp_port_opt =
        cmd->add_option("--tcp-port", opts.tcp_port, "Fixed TCP port (0 = ephemeral)");
}

std::vector<int> parse_user_counts(const std::string& text) {
    std::vector<int> counts;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        std::size_t consumed = 0;
        int value = 0;
        try {
            value = std::stoi(token, &consumed);
        } catch (const std::exception&) {
            consumed = 0;
        }
        if (consumed != token.size() || token.empty() || value < 1) {
            throw std::invalid_argument("invalid user count \"" + token + "\" in --users");
        }
        counts.push_back(value);
    }
    if (counts.empty()) throw std::invalid_argument("--users list is empty");
    return counts;
}

RunConfig build_config(const CommandOpts& opts) {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file " + opts.config_path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config " + opts.config_path + ": " + e.what());
    }
    RunConfig cfg = parse_run_config(doc);
    if (opts.algo_opt->count() > 0) cfg.algorithm = algorithm_from_string(opts.algo);
    cfg.seed = opts.seed;
    cfg.out_dir = opts.out_dir;
    if (opts.transport_opt->count() > 0) cfg.transport = transport_mode_from_string(opts.transport);
    if (opts.tcp_port_opt->count() > 0) cfg.tcp_port = opts.tcp_port;
    return cfg;
}

// train/eval address one population size; --users must name exactly one.
void apply_single_user_count(RunConfig& cfg, const CommandOpts& opts) {
    if (opts.users_opt->count() == 0) return;
    const std::vector<int> counts = parse_user_counts(opts.users);
    if (counts.size() != 1) {
        throw std::invalid_argument("train/eval take exactly one --users value");
    }
    cfg.system.num_users = counts.front();
}

int run_train(const CommandOpts& opts) {
    RunConfig cfg = build_config(opts);
    apply_single_user_count(cfg, opts);
    if (!is_learning(cfg.algorithm)) {
        throw std::invalid_argument("train requires --algo sac or ddpg; " +
                                    to_string(cfg.algorithm) + " has nothing to learn");
    }
    resolve_run_config(cfg);

    const TrainResult trained = train(cfg);
    const EvalResult eval = evaluate_agent(*trained.agent, cfg);

    const fs::path out(cfg.out_dir);
    write_episodes_csv(out / "episodes.csv", trained.episodes);
    write_per_user_csv(out / "per_user.csv", eval.users);
    write_run_json(out / "run.json", cfg);
    write_checkpoint(out / "checkpoint.json", *trained.agent);

    std::cout << "trained " << to_string(cfg.algorithm) << ": " << cfg.episodes << " episodes, "
              << cfg.system.num_users << " users, seed " << cfg.seed << '\n'
              << "eval mean reward " << eval.mean_reward << ", mean latency " << eval.mean_latency
              << ", success rate " << eval.success_rate << '\n'
              << "wrote " << (out / "episodes.csv").string() << " per_user.csv run.json"
              << " checkpoint.json" << '\n';
    return 0;
}

int run_eval(const CommandOpts& opts) {
    RunConfig cfg = build_config(opts);
    apply_single_user_count(cfg, opts);
    resolve_run_config(cfg);

    EvalResult eval;
    if (is_learning(cfg.algorithm)) {
        if (opts.checkpoint.empty()) {
            throw std::invalid_argument("eval of " + to_string(cfg.algorithm) +
                                        " requires --checkpoint");
        }
        const std::unique_ptr<Agent> agent = load_agent(cfg, opts.checkpoint);
        eval = evaluate_agent(*agent, cfg);
    } else {
        eval = evaluate_baseline(cfg);
    }

    const fs::path out(cfg.out_dir);
    write_episodes_csv(out / "episodes.csv", eval.episodes);
    write_per_user_csv(out / "per_user.csv", eval.users);
    write_run_json(out / "run.json", cfg);

    std::cout << "evaluated " << to_string(cfg.algorithm) << ": " << cfg.eval_episodes
              << " episodes, " << cfg.system.num_users << " users, seed " << cfg.seed << '\n'
              << "mean reward " << eval.mean_reward << ", mean latency " << eval.mean_latency
              << ", success rate " << eval.success_rate << '\n'
              << "wrote " << (out / "episodes.csv").string() << " per_user.csv run.json" << '\n';
    return 0;
}

int run_sweep(const CommandOpts& opts) {
    const RunConfig base = build_config(opts);

    std::vector<int> counts{2, 4, 8, 16};
    if (opts.users_opt->count() > 0) counts = parse_user_counts(opts.users);

    std::vector<Algorithm> algorithms{Algorithm::Sac, Algorithm::Ddpg, Algorithm::Avg,
                                      Algorithm::CloudAvg};
    if (opts.algo_opt->count() > 0) algorithms = {algorithm_from_string(opts.algo)};

    const std::vector<SweepRecord> rows = sweep_users(base, counts, algorithms);

    const fs::path out(base.out_dir);
    write_sweep_csv(out / "sweep.csv", rows);
    write_run_json(out / "run.json", base);

    std::cout << "swept " << algorithms.size() << " algorithm(s) x " << counts.size()
              << " user count(s): " << rows.size() << " rows\n"
              << "wrote " << (out / "sweep.csv").string() << " run.json" << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resource-allocation experiments for multiuser immersive volumetric video"};
    app.require_subcommand(1);

    CommandOpts train_opts;
    CommandOpts eval_opts;
    CommandOpts sweep_opts;

    CLI::App* train_cmd =
        app.add_subcommand("train", "Train a learning policy and evaluate the result");
    add_common_options(train_cmd, train_opts, /*algo_required=*/true);

    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a baseline or a saved checkpoint");
    add_common_options(eval_cmd, eval_opts, /*algo_required=*/true);
    eval_cmd->add_option("--checkpoint", eval_opts.checkpoint,
                         "Checkpoint file for sac/ddpg evaluation");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Train/evaluate every algorithm across user counts");
    add_common_options(sweep_cmd, sweep_opts, /*algo_required=*/false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return run_train(train_opts);
        if (eval_cmd->parsed()) return run_eval(eval_opts);
        return run_sweep(sweep_opts);
    } catch (const std::exception& e) {
        std::cerr << "imvol: " << e.what() << '\n';
        return 1;
    }
}
