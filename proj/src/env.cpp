#include "imvol/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace imvol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rate_inputs(double b, double p, double gain, double sigma2, const char* dir) {
    if (!std::isfinite(b) || !std::isfinite(p) || !std::isfinite(gain) || !std::isfinite(sigma2) ||
        b < 0.0 || p < 0.0 || gain <= 0.0 || sigma2 <= 0.0) {
        throw std::domain_error(std::string(dir) + "_rate: inputs must be finite, b/p >= 0, gain/sigma2 > 0");
    }
}

// demand/denominator with the infeasibility convention: zero demand costs
// nothing, positive demand against a zero denominator never completes.
double latency_term(double demand, double denom) {
    if (demand == 0.0) return 0.0;
    if (denom == 0.0) return kInf;
    return demand / denom;
}

}  // namespace

double download_rate(double b_dl, double p_dl, double gain, double sigma2) {
    check_rate_inputs(b_dl, p_dl, gain, sigma2, "download");
    return b_dl * std::log2(1.0 + p_dl * gain / sigma2);
}

double upload_rate(double b_ul, double p_ul, double gain, double sigma2) {
    check_rate_inputs(b_ul, p_ul, gain, sigma2, "upload");
    return b_ul * std::log2(1.0 + p_ul * gain / sigma2);
}

LatencyBreakdown frame_latency(const UserState& user, const UserAllocation& alloc,
                               const SystemConfig& cfg) {
    LatencyBreakdown out;
    const double r_ul = upload_rate(alloc.b_ul, user.p_ul, user.gain, cfg.sigma2);
    out.t_ul = latency_term(user.a_ul, r_ul);
    if (alloc.phi > 0.0) {
        const double r_dl = download_rate(alloc.b_dl, alloc.p_dl, user.gain, cfg.sigma2);
        out.t_comp = latency_term(user.a_comp * alloc.phi, alloc.f);
        out.t_dl = latency_term(user.a_dl * alloc.phi, r_dl);
    }
    out.t_total = out.t_ul + out.t_comp + out.t_dl;
    if (cfg.rendering_site == RenderingSite::Cloud) {
        out.t_total += 2.0 * cfg.backhaul_latency;
    }
    return out;
}

double qoe_score(double t_total, double phi, double t_th, double qoe_floor) {
    if (!(t_th > 0.0)) throw std::domain_error("qoe_score: t_th must be positive");
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("qoe_score: phi must lie in [0,1]");
    if (!std::isfinite(t_total)) return qoe_floor;
    return (1.0 - t_total / t_th) * std::log1p(phi);
}

double coefficient_of_variation(std::span<const double> values) {
    if (values.empty()) throw std::domain_error("coefficient_of_variation: empty input");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    return std::sqrt(var) / (std::abs(mean) + 1e-8);
}

double system_reward(std::span<const double> qoes, double beta1) {
    const double total = std::accumulate(qoes.begin(), qoes.end(), 0.0);
    return total - beta1 * coefficient_of_variation(qoes);
}

AllocationAction normalize_action(std::span<const double> raw, const SystemConfig& cfg) {
    const std::size_t u = static_cast<std::size_t>(cfg.num_users);
    if (raw.size() != 5 * u) {
        throw std::domain_error("normalize_action: raw vector must have length 5 * num_users");
    }
    AllocationAction action;
    auto scale_group = [&](std::size_t offset, double budget, std::vector<double>& out) {
        const auto group = raw.subspan(offset, u);
        const double total = std::accumulate(group.begin(), group.end(), 0.0);
        out.resize(u);
        if (total == 0.0) {
            std::fill(out.begin(), out.end(), budget / static_cast<double>(u));
            return;
        }
        for (std::size_t i = 0; i < u; ++i) out[i] = budget * group[i] / (total + 1e-8);
    };
    scale_group(0 * u, cfg.b_max_ul, action.b_ul);
    scale_group(1 * u, cfg.f_max, action.f);
    scale_group(2 * u, cfg.b_max_dl, action.b_dl);
    scale_group(3 * u, cfg.p_max, action.p_dl);
    action.phi.assign(raw.begin() + static_cast<std::ptrdiff_t>(4 * u), raw.end());
    return action;
}

std::optional<std::string> validate_action(const AllocationAction& action,
                                           const SystemConfig& cfg) {
    const std::size_t u = static_cast<std::size_t>(cfg.num_users);
    if (action.b_ul.size() != u || action.f.size() != u || action.b_dl.size() != u ||
        action.p_dl.size() != u || action.phi.size() != u) {
        return "action user count does not match config";
    }
    auto check_group = [&](const std::vector<double>& vals, double budget,
                           const char* what) -> std::optional<std::string> {
        double total = 0.0;
        for (double v : vals) {
            if (!std::isfinite(v) || v < 0.0) {
                return std::string(what) + " entry negative or non-finite";
            }
            total += v;
        }
        // budget tolerance absorbs normalize_action rounding
        if (total > budget * (1.0 + 1e-9) + 1e-12) {
            return std::string(what) + " budget exceeded";
        }
        return std::nullopt;
    };
    if (auto err = check_group(action.b_ul, cfg.b_max_ul, "upload bandwidth")) return err;
    if (auto err = check_group(action.f, cfg.f_max, "compute")) return err;
    if (auto err = check_group(action.b_dl, cfg.b_max_dl, "download bandwidth")) return err;
    if (auto err = check_group(action.p_dl, cfg.p_max, "power")) return err;
    for (double phi : action.phi) {
        if (!std::isfinite(phi) || phi < 0.0 || phi > 1.0) return "hit ratio out of range";
    }
    return std::nullopt;
}

std::vector<UserState> reset_users(const SystemConfig& cfg, Rng& rng) {
    std::vector<UserState> states(static_cast<std::size_t>(cfg.num_users));
    for (std::size_t i = 0; i < states.size(); ++i) {
        UserState& s = states[i];
        s.tier = static_cast<int>(i % kTierDemand.size());
        s.a_comp = kTierDemand[static_cast<std::size_t>(s.tier)];
        s.a_dl = kTierDemand[static_cast<std::size_t>(s.tier)];
        s.a_ul = cfg.pose_payload;
        s.p_ul = cfg.upload_power;
        s.gain = rng.uniform(cfg.gain_range[0], cfg.gain_range[1]);
    }
    return states;
}

std::vector<UserState> reset_users(const SystemConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    return reset_users(cfg, rng);
}

StepOutcome compute_outcome(std::span<const UserState> states,
                            const AllocationAction& action, const SystemConfig& cfg) {
    const std::size_t u = states.size();
    StepOutcome out;
    out.t_ul.resize(u);
    out.t_comp.resize(u);
    out.t_dl.resize(u);
    out.t_total.resize(u);
    out.qoe.resize(u);
    out.success.resize(u);
    for (std::size_t i = 0; i < u; ++i) {
        const UserAllocation alloc{action.b_ul[i], action.f[i], action.b_dl[i],
                                   action.p_dl[i], action.phi[i]};
        const LatencyBreakdown lat = frame_latency(states[i], alloc, cfg);
        out.t_ul[i] = lat.t_ul;
        out.t_comp[i] = lat.t_comp;
        out.t_dl[i] = lat.t_dl;
        out.t_total[i] = lat.t_total;
        out.qoe[i] = qoe_score(lat.t_total, alloc.phi, cfg.t_th, cfg.qoe_floor);
        out.success[i] = lat.t_total <= cfg.t_th ? 1 : 0;
    }
    out.reward = system_reward(out.qoe, cfg.beta1);
    return out;
}

std::vector<UserState> advance_states(std::span<const UserState> states,
                                      const SystemConfig& cfg, Rng& rng) {
    std::vector<UserState> next(states.begin(), states.end());
    for (UserState& s : next) {
        s.gain = rng.uniform(cfg.gain_range[0], cfg.gain_range[1]);
    }
    return next;
}

std::pair<std::vector<UserState>, StepOutcome> step(std::span<const UserState> states,
                                                    const AllocationAction& action,
                                                    const SystemConfig& cfg, Rng& rng) {
    if (states.size() != static_cast<std::size_t>(cfg.num_users)) {
        throw std::domain_error("step: state count does not match config");
    }
    if (auto err = validate_action(action, cfg)) {
        throw std::domain_error("step: " + *err);
    }
    StepOutcome outcome = compute_outcome(states, action, cfg);
    return {advance_states(states, cfg, rng), std::move(outcome)};
}

std::vector<double> flatten_states(std::span<const UserState> states) {
    std::vector<double> flat;
    flat.reserve(states.size() * 5);
    for (const UserState& s : states) {
        flat.push_back(s.gain);
        flat.push_back(s.a_ul);
        flat.push_back(s.a_comp);
        flat.push_back(s.a_dl);
        flat.push_back(s.p_ul);
    }
    return flat;
}

Environment::Environment(SystemConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), rng_(seed) {
    cfg_.validate();
    reset();
}

const std::vector<UserState>& Environment::reset() {
    states_ = reset_users(cfg_, rng_);
    return states_;
}

StepOutcome Environment::step(const AllocationAction& action) {
    auto [next, outcome] = imvol::step(states_, action, cfg_, rng_);
    states_ = std::move(next);
    return outcome;
}

}  // namespace imvol
