#include "imvol/config.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace imvol {

std::string to_string(RenderingSite site) {
    return site == RenderingSite::OCloud ? "ocloud" : "cloud";
}

RenderingSite rendering_site_from_string(const std::string& name) {
    if (name == "ocloud") return RenderingSite::OCloud;
    if (name == "cloud") return RenderingSite::Cloud;
    throw std::invalid_argument("unknown rendering_site '" + name + "' (expected ocloud|cloud)");
}

void SystemConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(name) + " must be strictly positive");
        }
    };
    if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
    positive(b_max_dl, "b_max_dl");
    positive(b_max_ul, "b_max_ul");
    positive(f_max, "f_max");
    positive(p_max, "p_max");
    positive(sigma2, "sigma2");
    positive(t_th, "t_th");
    positive(upload_power, "upload_power");
    positive(pose_payload, "pose_payload");
    if (!(gain_range[0] > 0.0) || !(gain_range[0] <= gain_range[1])) {
        throw std::invalid_argument("gain_range must satisfy 0 < lo <= hi");
    }
    if (backhaul_latency < 0.0) throw std::invalid_argument("backhaul_latency must be >= 0");
    if (beta1 < 0.0) throw std::invalid_argument("beta1 must be >= 0");
    if (steps_per_episode < 1) throw std::invalid_argument("steps_per_episode must be >= 1");
    if (!std::isfinite(qoe_floor)) throw std::invalid_argument("qoe_floor must be finite");
}

void apply_system_config(SystemConfig& cfg, const nlohmann::json& doc) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "num_users") cfg.num_users = value.get<int>();
        else if (key == "b_max_dl") cfg.b_max_dl = value.get<double>();
        else if (key == "b_max_ul") cfg.b_max_ul = value.get<double>();
        else if (key == "f_max") cfg.f_max = value.get<double>();
        else if (key == "p_max") cfg.p_max = value.get<double>();
        else if (key == "sigma2") cfg.sigma2 = value.get<double>();
        else if (key == "t_th") cfg.t_th = value.get<double>();
        else if (key == "beta1") cfg.beta1 = value.get<double>();
        else if (key == "backhaul_latency") cfg.backhaul_latency = value.get<double>();
        else if (key == "gain_range") {
            if (!value.is_array() || value.size() != 2) {
                throw std::invalid_argument("gain_range must be a [lo, hi] array");
            }
            cfg.gain_range = {value[0].get<double>(), value[1].get<double>()};
        } else if (key == "upload_power") cfg.upload_power = value.get<double>();
        else if (key == "steps_per_episode") cfg.steps_per_episode = value.get<int>();
        else if (key == "rendering_site") cfg.rendering_site = rendering_site_from_string(value.get<std::string>());
        else if (key == "pose_payload") cfg.pose_payload = value.get<double>();
        else if (key == "qoe_floor") cfg.qoe_floor = value.get<double>();
        // other keys belong to the run-level config; the caller rejects true strays
    }
}

void system_config_to_json(const SystemConfig& cfg, nlohmann::json& out) {
    out["num_users"] = cfg.num_users;
    out["b_max_dl"] = cfg.b_max_dl;
    out["b_max_ul"] = cfg.b_max_ul;
    out["f_max"] = cfg.f_max;
    out["p_max"] = cfg.p_max;
    out["sigma2"] = cfg.sigma2;
    out["t_th"] = cfg.t_th;
    out["beta1"] = cfg.beta1;
    out["backhaul_latency"] = cfg.backhaul_latency;
    out["gain_range"] = {cfg.gain_range[0], cfg.gain_range[1]};
    out["upload_power"] = cfg.upload_power;
    out["steps_per_episode"] = cfg.steps_per_episode;
    out["rendering_site"] = to_string(cfg.rendering_site);
    out["pose_payload"] = cfg.pose_payload;
    out["qoe_floor"] = cfg.qoe_floor;
}

}  // namespace imvol
