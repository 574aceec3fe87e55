#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "imvol/harness.hpp"
#include "imvol/sac.hpp"

using namespace imvol;
namespace fs = std::filesystem;

namespace {

// Small, fast run: 2 users, short episodes, tiny warmup.
RunConfig tiny_run(Algorithm algorithm) {
    RunConfig cfg;
    cfg.algorithm = algorithm;
    cfg.episodes = 3;
    cfg.updates_per_env_step = 2;
    cfg.seed = 42;
    cfg.eval_episodes = 2;
    cfg.system.num_users = 2;
    cfg.system.steps_per_episode = 6;
    cfg.batch_size = 16;
    cfg.buffer_capacity = 64;
    resolve_run_config(cfg);
    return cfg;
}

fs::path fresh_dir() {
    static std::atomic<int> counter{0};
    const fs::path dir =
        fs::temp_directory_path() / ("imvol-harness-" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream stream(line);
    std::string cell;
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    return cells;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(split_csv(line));
    return rows;
}

double parse_double(const std::string& text) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    REQUIRE(end == text.c_str() + text.size());
    return value;
}

bool same_record(const EpisodeRecord& a, const EpisodeRecord& b) {
    // Wall clock is timing noise by design; every metric field must match bitwise.
    return a.episode == b.episode && a.reward == b.reward && a.mean_qoe == b.mean_qoe &&
           a.mean_latency == b.mean_latency && a.mean_hit_ratio == b.mean_hit_ratio &&
           a.success_rate == b.success_rate;
}

bool same_user(const UserRecord& a, const UserRecord& b) {
    return a.user == b.user && a.tier == b.tier && a.mean_qoe == b.mean_qoe &&
           a.mean_latency == b.mean_latency && a.mean_hit_ratio == b.mean_hit_ratio &&
           a.success_rate == b.success_rate;
}

}  // namespace

TEST_SUITE("harness.config") {
    TEST_CASE("defaults parse from an empty object") {
        const RunConfig cfg = parse_run_config(nlohmann::json::object());
        CHECK(cfg.algorithm == Algorithm::Sac);
        CHECK(cfg.episodes == 200);
        CHECK(cfg.updates_per_env_step == 10);
        CHECK(cfg.seed == 0);
        CHECK(cfg.eval_episodes == 20);
        CHECK(cfg.out_dir.empty());
        CHECK(cfg.transport == TransportMode::Inproc);
        CHECK(cfg.tcp_port == 0);
        CHECK(cfg.batch_size == 128);
        CHECK(cfg.buffer_capacity == 10000);
        CHECK(cfg.system.num_users == 8);
        CHECK(cfg.system.steps_per_episode == 20);
    }

    TEST_CASE("run and system keys both apply") {
        const nlohmann::json doc = nlohmann::json::parse(R"({
            "algorithm": "ddpg",
            "episodes": 7,
            "updates_per_env_step": 3,
            "seed": 99,
            "eval_episodes": 4,
            "out_dir": "runs/x",
            "transport": "tcp-loopback",
            "tcp_port": 4555,
            "batch_size": 32,
            "buffer_capacity": 256,
            "num_users": 4,
            "b_max_dl": 80.0,
            "t_th": 6.5,
            "gain_range": [0.25, 3.0],
            "rendering_site": "cloud",
            "steps_per_episode": 11
        })");
        const RunConfig cfg = parse_run_config(doc);
        CHECK(cfg.algorithm == Algorithm::Ddpg);
        CHECK(cfg.episodes == 7);
        CHECK(cfg.updates_per_env_step == 3);
        CHECK(cfg.seed == 99);
        CHECK(cfg.eval_episodes == 4);
        CHECK(cfg.out_dir == "runs/x");
        CHECK(cfg.transport == TransportMode::TcpLoopback);
        CHECK(cfg.tcp_port == 4555);
        CHECK(cfg.batch_size == 32);
        CHECK(cfg.buffer_capacity == 256);
        CHECK(cfg.system.num_users == 4);
        CHECK(cfg.system.b_max_dl == 80.0);
        CHECK(cfg.system.t_th == 6.5);
        CHECK(cfg.system.gain_range[0] == 0.25);
        CHECK(cfg.system.gain_range[1] == 3.0);
        CHECK(cfg.system.rendering_site == RenderingSite::Cloud);
        CHECK(cfg.system.steps_per_episode == 11);
    }

    TEST_CASE("unknown keys are rejected by name") {
        CHECK_THROWS_WITH_AS(parse_run_config(nlohmann::json{{"rho", 1}}),
                             R"(unknown config key "rho")", std::invalid_argument);
        CHECK_THROWS_AS(parse_run_config(nlohmann::json::parse("[1,2]")), std::invalid_argument);
    }

    TEST_CASE("algorithm names and indices") {
        const Algorithm all[] = {Algorithm::Sac, Algorithm::Ddpg, Algorithm::Avg,
                                 Algorithm::CloudAvg};
        for (Algorithm a : all) CHECK(algorithm_from_string(to_string(a)) == a);
        CHECK(algorithm_index(Algorithm::Sac) == 0);
        CHECK(algorithm_index(Algorithm::Ddpg) == 1);
        CHECK(algorithm_index(Algorithm::Avg) == 2);
        CHECK(algorithm_index(Algorithm::CloudAvg) == 3);
        CHECK(is_learning(Algorithm::Sac));
        CHECK(is_learning(Algorithm::Ddpg));
        CHECK_FALSE(is_learning(Algorithm::Avg));
        CHECK_FALSE(is_learning(Algorithm::CloudAvg));
        CHECK_THROWS_AS(algorithm_from_string("sarsa"), std::invalid_argument);
    }

    TEST_CASE("validate rejects broken invariants") {
        RunConfig cfg;
        cfg.episodes = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = RunConfig{};
        cfg.updates_per_env_step = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = RunConfig{};
        cfg.eval_episodes = -1;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = RunConfig{};
        cfg.batch_size = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = RunConfig{};
        cfg.buffer_capacity = cfg.batch_size - 1;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = RunConfig{};
        cfg.system.num_users = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        RunConfig ok;
        CHECK_NOTHROW(ok.validate());
    }

    TEST_CASE("resolve pins baseline rendering sites") {
        RunConfig cfg;
        cfg.algorithm = Algorithm::Avg;
        cfg.system.rendering_site = RenderingSite::Cloud;
        resolve_run_config(cfg);
        CHECK(cfg.system.rendering_site == RenderingSite::OCloud);

        cfg.algorithm = Algorithm::CloudAvg;
        resolve_run_config(cfg);
        CHECK(cfg.system.rendering_site == RenderingSite::Cloud);

        cfg.algorithm = Algorithm::Sac;
        cfg.system.rendering_site = RenderingSite::Cloud;
        resolve_run_config(cfg);
        CHECK(cfg.system.rendering_site == RenderingSite::Cloud);

        cfg.algorithm = Algorithm::Ddpg;
        cfg.system.rendering_site = RenderingSite::OCloud;
        resolve_run_config(cfg);
        CHECK(cfg.system.rendering_site == RenderingSite::OCloud);
    }

    TEST_CASE("resolved config json round trips") {
        RunConfig cfg = tiny_run(Algorithm::CloudAvg);
        cfg.seed = 2024;
        cfg.out_dir = "runs/demo";
        const nlohmann::json doc = run_config_to_json(cfg);
        CHECK(doc.at("seed") == 2024);
        CHECK(doc.at("algorithm") == "cloud-avg");
        CHECK(doc.at("rendering_site") == "cloud");
        CHECK(doc.at("batch_size") == 16);
        const RunConfig back = parse_run_config(doc);
        CHECK(run_config_to_json(back) == doc);
    }
}

TEST_SUITE("harness.train") {
    TEST_CASE("one record per episode and no update before warmup") {
        RunConfig cfg = tiny_run(Algorithm::Sac);
        cfg.episodes = 5;
        cfg.system.steps_per_episode = 10;
        cfg.batch_size = 128;  // 50 transitions total -> warmup never satisfied
        cfg.buffer_capacity = 256;
        const TrainResult result = train(cfg);

        REQUIRE(result.episodes.size() == 5);
        for (int e = 0; e < 5; ++e) {
            const EpisodeRecord& r = result.episodes[static_cast<std::size_t>(e)];
            CHECK(r.episode == e);
            CHECK(std::isfinite(r.reward));
            CHECK(std::isfinite(r.mean_qoe));
            CHECK(std::isfinite(r.mean_latency));
            CHECK(r.mean_latency > 0.0);
            CHECK(r.mean_hit_ratio > 0.0);
            CHECK(r.mean_hit_ratio < 1.0);
            CHECK(r.success_rate >= 0.0);
            CHECK(r.success_rate <= 1.0);
            CHECK(r.wall_clock_seconds >= 0.0);
        }

        // An untouched SAC temperature proves no gradient step ran.
        const auto* sac = dynamic_cast<const SacAgent*>(result.agent.get());
        REQUIRE(sac != nullptr);
        CHECK(sac->alpha() == 0.2);
    }

    TEST_CASE("updates engage once the buffer reaches batch size") {
        const RunConfig cfg = tiny_run(Algorithm::Sac);  // 18 transitions, batch 16
        const TrainResult result = train(cfg);
        const auto* sac = dynamic_cast<const SacAgent*>(result.agent.get());
        REQUIRE(sac != nullptr);
        CHECK(sac->alpha() != 0.2);
        CHECK(sac->alpha() > 0.0);
    }

    TEST_CASE("training is reproducible bit for bit") {
        for (Algorithm algorithm : {Algorithm::Sac, Algorithm::Ddpg}) {
            CAPTURE(to_string(algorithm));
            const RunConfig cfg = tiny_run(algorithm);
            const TrainResult a = train(cfg);
            const TrainResult b = train(cfg);
            REQUIRE(a.episodes.size() == b.episodes.size());
            for (std::size_t i = 0; i < a.episodes.size(); ++i) {
                CHECK(same_record(a.episodes[i], b.episodes[i]));
            }
            CHECK(a.agent->checkpoint() == b.agent->checkpoint());
        }
    }

    TEST_CASE("transports produce identical training metrics") {
        RunConfig inproc = tiny_run(Algorithm::Ddpg);
        RunConfig tcp = inproc;
        tcp.transport = TransportMode::TcpLoopback;
        tcp.tcp_port = 0;
        const TrainResult a = train(inproc);
        const TrainResult b = train(tcp);
        REQUIRE(a.episodes.size() == b.episodes.size());
        for (std::size_t i = 0; i < a.episodes.size(); ++i) {
            CHECK(same_record(a.episodes[i], b.episodes[i]));
        }
        CHECK(a.agent->checkpoint() == b.agent->checkpoint());
    }

    TEST_CASE("baselines cannot train") {
        CHECK_THROWS_AS(train(tiny_run(Algorithm::Avg)), std::invalid_argument);
        CHECK_THROWS_AS(make_agent(tiny_run(Algorithm::CloudAvg)), std::invalid_argument);
    }
}

TEST_SUITE("harness.eval") {
    static RunConfig eval_cfg(Algorithm algorithm, int users) {
        RunConfig cfg;
        cfg.algorithm = algorithm;
        cfg.seed = 7;
        cfg.eval_episodes = 4;
        cfg.system.num_users = users;
        cfg.system.steps_per_episode = 10;
        resolve_run_config(cfg);
        return cfg;
    }

    TEST_CASE("equal shares order latency by tier demand") {
        const RunConfig cfg = eval_cfg(Algorithm::Avg, 8);
        const EvalResult result = evaluate_baseline(cfg);

        REQUIRE(result.episodes.size() == 4);
        REQUIRE(result.users.size() == 8);
        double reward_sum = 0.0;
        for (const EpisodeRecord& r : result.episodes) {
            CHECK(r.mean_hit_ratio == 1.0);
            reward_sum += r.reward;
        }
        CHECK(result.mean_reward == doctest::Approx(reward_sum / 4.0).epsilon(1e-12));

        for (std::size_t u = 0; u < 8; ++u) {
            CHECK(result.users[u].user == static_cast<int>(u));
            CHECK(result.users[u].tier == static_cast<int>(u % 4));
            CHECK(result.users[u].mean_hit_ratio == 1.0);
            CHECK(std::isfinite(result.users[u].mean_latency));
        }
        // Demands grow with tier; equal shares make latency follow them.
        for (std::size_t i = 0; i < 8; ++i) {
            for (std::size_t j = 0; j < 8; ++j) {
                if (result.users[i].tier < result.users[j].tier) {
                    CHECK(result.users[i].mean_latency < result.users[j].mean_latency);
                }
            }
        }
    }

    TEST_CASE("cloud rendering adds exactly the round-trip backhaul") {
        const RunConfig near = eval_cfg(Algorithm::Avg, 8);
        const RunConfig far = eval_cfg(Algorithm::CloudAvg, 8);
        const EvalResult a = evaluate_baseline(near);
        const EvalResult b = evaluate_baseline(far);

        const double detour = 2.0 * near.system.backhaul_latency;
        CHECK(std::abs((b.mean_latency - a.mean_latency) - detour) < 1e-9);
        for (std::size_t u = 0; u < a.users.size(); ++u) {
            CHECK(std::abs((b.users[u].mean_latency - a.users[u].mean_latency) - detour) < 1e-9);
        }
        for (std::size_t e = 0; e < a.episodes.size(); ++e) {
            CHECK(std::abs((b.episodes[e].mean_latency - a.episodes[e].mean_latency) - detour) <
                  1e-9);
            CHECK(b.episodes[e].reward < a.episodes[e].reward);
        }
    }

    TEST_CASE("evaluation is transport invariant") {
        RunConfig inproc = eval_cfg(Algorithm::Avg, 4);
        RunConfig tcp = inproc;
        tcp.transport = TransportMode::TcpLoopback;
        const EvalResult a = evaluate_baseline(inproc);
        const EvalResult b = evaluate_baseline(tcp);

        CHECK(a.mean_reward == b.mean_reward);
        CHECK(a.mean_latency == b.mean_latency);
        CHECK(a.success_rate == b.success_rate);
        REQUIRE(a.episodes.size() == b.episodes.size());
        for (std::size_t i = 0; i < a.episodes.size(); ++i) {
            CHECK(same_record(a.episodes[i], b.episodes[i]));
        }
        REQUIRE(a.users.size() == b.users.size());
        for (std::size_t u = 0; u < a.users.size(); ++u) {
            CHECK(same_user(a.users[u], b.users[u]));
        }
    }

    TEST_CASE("agent evaluation is deterministic and survives checkpointing") {
        const RunConfig cfg = tiny_run(Algorithm::Sac);
        const TrainResult trained = train(cfg);
        const EvalResult a = evaluate_agent(*trained.agent, cfg);
        const EvalResult b = evaluate_agent(*trained.agent, cfg);
        REQUIRE(a.episodes.size() == b.episodes.size());
        for (std::size_t i = 0; i < a.episodes.size(); ++i) {
            CHECK(same_record(a.episodes[i], b.episodes[i]));
        }

        const fs::path dir = fresh_dir();
        write_checkpoint(dir / "checkpoint.json", *trained.agent);
        const std::unique_ptr<Agent> restored = load_agent(cfg, dir / "checkpoint.json");
        const EvalResult c = evaluate_agent(*restored, cfg);
        for (std::size_t i = 0; i < a.episodes.size(); ++i) {
            CHECK(same_record(a.episodes[i], c.episodes[i]));
        }
        for (std::size_t u = 0; u < a.users.size(); ++u) {
            CHECK(same_user(a.users[u], c.users[u]));
        }
    }

    TEST_CASE("evaluate_baseline rejects learning algorithms") {
        CHECK_THROWS_AS(evaluate_baseline(tiny_run(Algorithm::Sac)), std::invalid_argument);
    }

    TEST_CASE("missing checkpoint surfaces the path") {
        const RunConfig cfg = tiny_run(Algorithm::Sac);
        CHECK_THROWS_WITH_AS(load_agent(cfg, "/nonexistent/checkpoint.json"),
                             "cannot read checkpoint /nonexistent/checkpoint.json",
                             std::runtime_error);
    }
}

TEST_SUITE("harness.files") {
    TEST_CASE("episodes csv has the pinned header and round trips exactly") {
        std::vector<EpisodeRecord> records(2);
        records[0] = {0, 0.1 + 0.2, -1.0 / 3.0, 1e-300, 0.999, 0.25, 7.0};
        records[1] = {1, -42.5, 0.0, std::numeric_limits<double>::infinity(), 1.0, 0.0, 8.0};

        const fs::path path = fresh_dir() / "episodes.csv";
        write_episodes_csv(path, records);
        const auto rows = read_csv(path);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0] == std::vector<std::string>{"episode", "reward", "mean_qoe", "mean_latency",
                                                  "mean_hit_ratio", "success_rate"});
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& cells = rows[i + 1];
            REQUIRE(cells.size() == 6);
            CHECK(std::stoi(cells[0]) == records[i].episode);
            CHECK(parse_double(cells[1]) == records[i].reward);
            CHECK(parse_double(cells[2]) == records[i].mean_qoe);
            CHECK(parse_double(cells[3]) == records[i].mean_latency);
            CHECK(parse_double(cells[4]) == records[i].mean_hit_ratio);
            CHECK(parse_double(cells[5]) == records[i].success_rate);
        }
        // Wall clock must never reach the metrics file.
        CHECK(read_file(path).find("7") != 0);
        CHECK(read_file(path).find("wall") == std::string::npos);
    }

    TEST_CASE("per-user csv has the pinned header and round trips exactly") {
        std::vector<UserRecord> users(2);
        users[0] = {0, 0, 0.123456789012345678, 4.5, 1.0, 0.75};
        users[1] = {1, 3, -0.5, std::numeric_limits<double>::infinity(), 0.25, 0.0};

        const fs::path path = fresh_dir() / "per_user.csv";
        write_per_user_csv(path, users);
        const auto rows = read_csv(path);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0] == std::vector<std::string>{"user", "tier", "mean_qoe", "mean_latency",
                                                  "mean_hit_ratio", "success_rate"});
        for (std::size_t i = 0; i < users.size(); ++i) {
            const auto& cells = rows[i + 1];
            REQUIRE(cells.size() == 6);
            CHECK(std::stoi(cells[0]) == users[i].user);
            CHECK(std::stoi(cells[1]) == users[i].tier);
            CHECK(parse_double(cells[2]) == users[i].mean_qoe);
            CHECK(parse_double(cells[3]) == users[i].mean_latency);
            CHECK(parse_double(cells[4]) == users[i].mean_hit_ratio);
            CHECK(parse_double(cells[5]) == users[i].success_rate);
        }
    }

    TEST_CASE("sweep csv names algorithms and keeps cell seeds") {
        std::vector<SweepRecord> rows(2);
        rows[0] = {Algorithm::Avg, 4, 2004, 1.5, 9.25, 0.25};
        rows[1] = {Algorithm::CloudAvg, 16, 3016, -2.0, 40.5, 0.0};

        const fs::path path = fresh_dir() / "sweep.csv";
        write_sweep_csv(path, rows);
        const auto parsed = read_csv(path);
        REQUIRE(parsed.size() == 3);
        CHECK(parsed[0] == std::vector<std::string>{"algorithm", "users", "seed", "mean_reward",
                                                    "mean_latency", "success_rate"});
        CHECK(parsed[1][0] == "avg");
        CHECK(parsed[1][1] == "4");
        CHECK(parsed[1][2] == "2004");
        CHECK(parse_double(parsed[1][3]) == 1.5);
        CHECK(parsed[2][0] == "cloud-avg");
        CHECK(parsed[2][2] == "3016");
    }

    TEST_CASE("run json records the seed and every resolved default") {
        RunConfig cfg = tiny_run(Algorithm::Avg);
        cfg.seed = 314159;
        const fs::path path = fresh_dir() / "run.json";
        write_run_json(path, cfg);

        const nlohmann::json doc = nlohmann::json::parse(read_file(path));
        CHECK(doc.at("seed") == 314159);
        CHECK(doc.at("algorithm") == "avg");
        CHECK(doc.at("rendering_site") == "ocloud");
        CHECK(doc.at("transport") == "inproc");
        CHECK(doc.at("b_max_dl") == 40.0);
        CHECK(doc.at("beta1") == 0.5);
        CHECK(doc.at("buffer_capacity") == 64);
        // The echoed config is itself a valid input.
        RunConfig back = parse_run_config(doc);
        CHECK_NOTHROW(resolve_run_config(back));
    }

    TEST_CASE("rewrites are byte identical") {
        std::vector<EpisodeRecord> records(3);
        for (int i = 0; i < 3; ++i) {
            records[static_cast<std::size_t>(i)] = {i, 0.1 * i, -0.2 * i, 1.5 + i, 0.5, 0.25, 1.0};
        }
        const fs::path dir = fresh_dir();
        write_episodes_csv(dir / "a.csv", records);
        write_episodes_csv(dir / "b.csv", records);
        CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    }

    TEST_CASE("unwritable paths surface an error") {
        const fs::path dir = fresh_dir();
        std::ofstream(dir / "blocker").put('x');
        CHECK_THROWS_AS(
            write_episodes_csv(dir / "blocker" / "episodes.csv", std::vector<EpisodeRecord>{}),
            std::runtime_error);
    }
}

TEST_SUITE("harness.sweep") {
    TEST_CASE("table shape, row order, and derived cell seeds") {
        RunConfig base;
        base.seed = 5;
        base.eval_episodes = 2;
        base.system.steps_per_episode = 5;
        const int counts[] = {2, 4};
        const Algorithm algorithms[] = {Algorithm::Avg, Algorithm::CloudAvg};
        const std::vector<SweepRecord> rows = sweep_users(base, counts, algorithms);

        REQUIRE(rows.size() == 4);
        CHECK(rows[0].algorithm == Algorithm::Avg);
        CHECK(rows[0].users == 2);
        CHECK(rows[0].seed == 5 + 1000 * 2 + 2);
        CHECK(rows[1].algorithm == Algorithm::Avg);
        CHECK(rows[1].users == 4);
        CHECK(rows[1].seed == 5 + 1000 * 2 + 4);
        CHECK(rows[2].algorithm == Algorithm::CloudAvg);
        CHECK(rows[2].users == 2);
        CHECK(rows[2].seed == 5 + 1000 * 3 + 2);
        CHECK(rows[3].algorithm == Algorithm::CloudAvg);
        CHECK(rows[3].users == 4);
        CHECK(rows[3].seed == 5 + 1000 * 3 + 4);
        for (const SweepRecord& row : rows) {
            CHECK(std::isfinite(row.mean_reward));
            CHECK(std::isfinite(row.mean_latency));
            CHECK(row.success_rate >= 0.0);
            CHECK(row.success_rate <= 1.0);
        }
    }

    TEST_CASE("sweep rows are deterministic") {
        RunConfig base;
        base.seed = 11;
        base.eval_episodes = 2;
        base.system.steps_per_episode = 4;
        const int counts[] = {2, 8};
        const Algorithm algorithms[] = {Algorithm::Avg};
        const auto a = sweep_users(base, counts, algorithms);
        const auto b = sweep_users(base, counts, algorithms);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].algorithm == b[i].algorithm);
            CHECK(a[i].users == b[i].users);
            CHECK(a[i].seed == b[i].seed);
            CHECK(a[i].mean_reward == b[i].mean_reward);
            CHECK(a[i].mean_latency == b[i].mean_latency);
            CHECK(a[i].success_rate == b[i].success_rate);
        }
    }

    TEST_CASE("learned cells train before evaluating") {
        RunConfig base = tiny_run(Algorithm::Sac);
        base.seed = 3;
        const int counts[] = {2};
        const Algorithm algorithms[] = {Algorithm::Sac};
        const std::vector<SweepRecord> rows = sweep_users(base, counts, algorithms);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].seed == 3 + 0 + 2);
        CHECK(std::isfinite(rows[0].mean_reward));
        CHECK(std::isfinite(rows[0].mean_latency));
    }

    TEST_CASE("equal-share success degrades as users scale") {
        RunConfig base;
        base.seed = 17;
        base.eval_episodes = 6;
        base.system.steps_per_episode = 10;
        const int counts[] = {2, 4, 8, 16};
        const Algorithm algorithms[] = {Algorithm::Avg};
        const std::vector<SweepRecord> rows = sweep_users(base, counts, algorithms);
        REQUIRE(rows.size() == 4);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].success_rate <= rows[i - 1].success_rate);
        }
        CHECK(rows[0].success_rate > rows[3].success_rate);
    }
}
