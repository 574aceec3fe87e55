// Python bindings for the core operations: the closed-form link/latency/QoE
// model, the slot environment, the baseline policies, and the train/eval/
// sweep drivers. Experiment configs cross the boundary as JSON strings or
// dicts with the same flat keys the CLI accepts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "imvol/env.hpp"
#include "imvol/harness.hpp"
#include "imvol/policies.hpp"
#include "imvol/rng.hpp"

namespace py = pybind11;
using namespace imvol;

namespace {

nlohmann::json config_to_doc(const py::object& config) {
    if (py::isinstance<py::str>(config)) {
        return nlohmann::json::parse(config.cast<std::string>());
    }
    const py::object dumps = py::module_::import("json").attr("dumps");
    return nlohmann::json::parse(dumps(config).cast<std::string>());
}

RunConfig run_config_from(const py::object& config) {
    RunConfig cfg = parse_run_config(config_to_doc(config));
    resolve_run_config(cfg);
    return cfg;
}

py::dict episode_to_dict(const EpisodeRecord& r) {
    py::dict out;
    out["episode"] = r.episode;
    out["reward"] = r.reward;
    out["mean_qoe"] = r.mean_qoe;
    out["mean_latency"] = r.mean_latency;
    out["mean_hit_ratio"] = r.mean_hit_ratio;
    out["success_rate"] = r.success_rate;
    out["wall_clock_seconds"] = r.wall_clock_seconds;
    return out;
}

py::dict user_to_dict(const UserRecord& r) {
    py::dict out;
    out["user"] = r.user;
    out["tier"] = r.tier;
    out["mean_qoe"] = r.mean_qoe;
    out["mean_latency"] = r.mean_latency;
    out["mean_hit_ratio"] = r.mean_hit_ratio;
    out["success_rate"] = r.success_rate;
    return out;
}

py::dict eval_to_dict(const EvalResult& result) {
    py::list episodes;
    for (const EpisodeRecord& r : result.episodes) episodes.append(episode_to_dict(r));
    py::list users;
    for (const UserRecord& r : result.users) users.append(user_to_dict(r));
    py::dict out;
    out["episodes"] = episodes;
    out["users"] = users;
    out["mean_reward"] = result.mean_reward;
    out["mean_latency"] = result.mean_latency;
    out["success_rate"] = result.success_rate;
    return out;
}

// A trained (or reloaded) agent plus the config that shaped it.
class TrainedPolicy {
public:
    TrainedPolicy(RunConfig cfg, std::unique_ptr<Agent> agent,
                  std::vector<EpisodeRecord> episodes)
        : cfg_(std::move(cfg)), agent_(std::move(agent)), episodes_(std::move(episodes)) {}

    py::list episodes() const {
        py::list out;
        for (const EpisodeRecord& r : episodes_) out.append(episode_to_dict(r));
        return out;
    }

    std::vector<double> select_action(const std::vector<double>& state) {
        Rng inert(0);  // deterministic head; the stream is never consumed
        return agent_->select_action(state, false, inert);
    }

    py::dict evaluate() { return eval_to_dict(evaluate_agent(*agent_, cfg_)); }

    void save(const std::string& path) const { write_checkpoint(path, *agent_); }

    std::string algorithm() const { return to_string(cfg_.algorithm); }

private:
    RunConfig cfg_;
    std::unique_ptr<Agent> agent_;
    std::vector<EpisodeRecord> episodes_;
};

}  // namespace

PYBIND11_MODULE(_imvol, m) {
    m.doc() = "Resource allocation for multiuser immersive volumetric video: closed-form "
              "link/latency/QoE model, slot environment, baselines, and RL experiment drivers.";

    py::enum_<RenderingSite>(m, "RenderingSite")
        .value("OCLOUD", RenderingSite::OCloud)
        .value("CLOUD", RenderingSite::Cloud);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("num_users", &SystemConfig::num_users)
        .def_readwrite("b_max_dl", &SystemConfig::b_max_dl)
        .def_readwrite("b_max_ul", &SystemConfig::b_max_ul)
        .def_readwrite("f_max", &SystemConfig::f_max)
        .def_readwrite("p_max", &SystemConfig::p_max)
        .def_readwrite("sigma2", &SystemConfig::sigma2)
        .def_readwrite("t_th", &SystemConfig::t_th)
        .def_readwrite("beta1", &SystemConfig::beta1)
        .def_readwrite("backhaul_latency", &SystemConfig::backhaul_latency)
        .def_readwrite("gain_range", &SystemConfig::gain_range)
        .def_readwrite("upload_power", &SystemConfig::upload_power)
        .def_readwrite("steps_per_episode", &SystemConfig::steps_per_episode)
        .def_readwrite("rendering_site", &SystemConfig::rendering_site)
        .def_readwrite("pose_payload", &SystemConfig::pose_payload)
        .def_readwrite("qoe_floor", &SystemConfig::qoe_floor)
        .def("state_dim", &SystemConfig::state_dim)
        .def("action_dim", &SystemConfig::action_dim)
        .def("validate", &SystemConfig::validate);

    py::class_<UserState>(m, "UserState")
        .def(py::init<>())
        .def_readwrite("gain", &UserState::gain)
        .def_readwrite("a_ul", &UserState::a_ul)
        .def_readwrite("a_comp", &UserState::a_comp)
        .def_readwrite("a_dl", &UserState::a_dl)
        .def_readwrite("p_ul", &UserState::p_ul)
        .def_readwrite("tier", &UserState::tier);

    py::class_<UserAllocation>(m, "UserAllocation")
        .def(py::init<>())
        .def_readwrite("b_ul", &UserAllocation::b_ul)
        .def_readwrite("f", &UserAllocation::f)
        .def_readwrite("b_dl", &UserAllocation::b_dl)
        .def_readwrite("p_dl", &UserAllocation::p_dl)
        .def_readwrite("phi", &UserAllocation::phi);

    py::class_<AllocationAction>(m, "AllocationAction")
        .def(py::init<>())
        .def_readwrite("b_ul", &AllocationAction::b_ul)
        .def_readwrite("f", &AllocationAction::f)
        .def_readwrite("b_dl", &AllocationAction::b_dl)
        .def_readwrite("p_dl", &AllocationAction::p_dl)
        .def_readwrite("phi", &AllocationAction::phi)
        .def("num_users", &AllocationAction::num_users);

    py::class_<LatencyBreakdown>(m, "LatencyBreakdown")
        .def_readonly("t_ul", &LatencyBreakdown::t_ul)
        .def_readonly("t_comp", &LatencyBreakdown::t_comp)
        .def_readonly("t_dl", &LatencyBreakdown::t_dl)
        .def_readonly("t_total", &LatencyBreakdown::t_total);

    py::class_<StepOutcome>(m, "StepOutcome")
        .def_readonly("t_ul", &StepOutcome::t_ul)
        .def_readonly("t_comp", &StepOutcome::t_comp)
        .def_readonly("t_dl", &StepOutcome::t_dl)
        .def_readonly("t_total", &StepOutcome::t_total)
        .def_readonly("qoe", &StepOutcome::qoe)
        .def_readonly("success", &StepOutcome::success)
        .def_readonly("reward", &StepOutcome::reward);

    py::class_<Environment>(m, "Environment")
        .def(py::init<SystemConfig, std::uint64_t>(), py::arg("config"), py::arg("seed"))
        .def("reset",
             [](Environment& env) { return std::vector<UserState>(env.reset()); })
        .def("step", &Environment::step, py::arg("action"))
        .def("states",
             [](const Environment& env) { return std::vector<UserState>(env.states()); })
        .def_property_readonly("config", &Environment::config);

    // closed-form model
    m.def("download_rate", &download_rate, py::arg("b_dl"), py::arg("p_dl"), py::arg("gain"),
          py::arg("sigma2"));
    m.def("upload_rate", &upload_rate, py::arg("b_ul"), py::arg("p_ul"), py::arg("gain"),
          py::arg("sigma2"));
    m.def("frame_latency", &frame_latency, py::arg("user"), py::arg("alloc"), py::arg("config"));
    m.def("qoe_score", &qoe_score, py::arg("t_total"), py::arg("phi"), py::arg("t_th"),
          py::arg("qoe_floor"));
    m.def("coefficient_of_variation",
          [](const std::vector<double>& values) { return coefficient_of_variation(values); },
          py::arg("values"));
    m.def("system_reward",
          [](const std::vector<double>& qoes, double beta1) {
              return system_reward(qoes, beta1);
          },
          py::arg("qoes"), py::arg("beta1"));

    // action plumbing
    m.def("normalize_action",
          [](const std::vector<double>& raw, const SystemConfig& cfg) {
              return normalize_action(raw, cfg);
          },
          py::arg("raw"), py::arg("config"));
    m.def("validate_action",
          [](const AllocationAction& action, const SystemConfig& cfg) {
              return validate_action(action, cfg);
          },
          py::arg("action"), py::arg("config"));
    m.def("flatten_states",
          [](const std::vector<UserState>& states) { return flatten_states(states); },
          py::arg("states"));

    // baselines
    m.def("avg_policy",
          [](const std::vector<UserState>& states, const SystemConfig& cfg) {
              return avg_policy(states, cfg);
          },
          py::arg("states"), py::arg("config"));
    m.def("cloud_avg_policy",
          [](const std::vector<UserState>& states, const SystemConfig& cfg) {
              return cloud_avg_policy(states, cfg);
          },
          py::arg("states"), py::arg("config"));

    // experiment drivers
    py::class_<TrainedPolicy>(m, "TrainedPolicy")
        .def("episodes", &TrainedPolicy::episodes)
        .def("select_action", &TrainedPolicy::select_action, py::arg("state"))
        .def("evaluate", &TrainedPolicy::evaluate)
        .def("save", &TrainedPolicy::save, py::arg("path"))
        .def_property_readonly("algorithm", &TrainedPolicy::algorithm);

    m.def("default_config", [] {
        const py::object loads = py::module_::import("json").attr("loads");
        return loads(run_config_to_json(RunConfig{}).dump());
    });

    m.def(
        "train",
        [](const py::object& config) {
            RunConfig cfg = run_config_from(config);
            TrainResult result = train(cfg);
            return TrainedPolicy(std::move(cfg), std::move(result.agent),
                                 std::move(result.episodes));
        },
        py::arg("config"),
        "Train the configured sac/ddpg policy; returns a TrainedPolicy with the "
        "per-episode training metrics.");

    m.def(
        "load_policy",
        [](const py::object& config, const std::string& path) {
            RunConfig cfg = run_config_from(config);
            std::unique_ptr<Agent> agent = load_agent(cfg, path);
            return TrainedPolicy(std::move(cfg), std::move(agent), {});
        },
        py::arg("config"), py::arg("checkpoint"),
        "Rebuild a trained policy from a checkpoint file.");

    m.def(
        "evaluate_baseline",
        [](const py::object& config) { return eval_to_dict(evaluate_baseline(run_config_from(config))); },
        py::arg("config"),
        "Evaluate the configured avg/cloud-avg baseline; returns aggregate metrics.");

    m.def(
        "sweep",
        [](const py::object& config, const std::vector<int>& user_counts,
           const std::vector<std::string>& algorithms) {
            const RunConfig base = [&] {
                RunConfig cfg = parse_run_config(config_to_doc(config));
                return cfg;
            }();
            std::vector<Algorithm> algos;
            algos.reserve(algorithms.size());
            for (const std::string& name : algorithms) algos.push_back(algorithm_from_string(name));
            py::list out;
            for (const SweepRecord& row : sweep_users(base, user_counts, algos)) {
                py::dict cell;
                cell["algorithm"] = to_string(row.algorithm);
                cell["users"] = row.users;
                cell["seed"] = row.seed;
                cell["mean_reward"] = row.mean_reward;
                cell["mean_latency"] = row.mean_latency;
                cell["success_rate"] = row.success_rate;
                out.append(cell);
            }
            return out;
        },
        py::arg("config"), py::arg("user_counts"),
        py::arg("algorithms") = std::vector<std::string>{"sac", "ddpg", "avg", "cloud-avg"},
        "Train/evaluate every (algorithm, user count) cell; returns one dict per cell.");
}
