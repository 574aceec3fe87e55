#include "imvol/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace imvol {

namespace {

void check_shapes(const std::vector<LayerParam>& a, const std::vector<LayerParam>& b,
                  const char* what) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": layer count mismatch");
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l].w.rows() != b[l].w.rows() || a[l].w.cols() != b[l].w.cols() ||
            a[l].b.size() != b[l].b.size()) {
            throw std::invalid_argument(std::string(what) + ": layer shape mismatch");
        }
    }
}

}  // namespace

AdamState::AdamState(const std::vector<LayerParam>& params, AdamConfig cfg) : cfg_(cfg) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t l = 0; l < params.size(); ++l) {
        m_[l].w = Eigen::MatrixXd::Zero(params[l].w.rows(), params[l].w.cols());
        m_[l].b = Eigen::VectorXd::Zero(params[l].b.size());
        v_[l].w = m_[l].w;
        v_[l].b = m_[l].b;
    }
}

void AdamState::step(std::vector<LayerParam>& params, const std::vector<LayerParam>& grads) {
    check_shapes(m_, params, "AdamState::step(params)");
    check_shapes(m_, grads, "AdamState::step(grads)");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t l = 0; l < params.size(); ++l) {
        auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
            m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
            v = (cfg_.beta2 * v.array() + (1.0 - cfg_.beta2) * g.array().square()).matrix();
            p.array() -= cfg_.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg_.eps);
        };
        update(params[l].w, m_[l].w, v_[l].w, grads[l].w);
        update(params[l].b, m_[l].b, v_[l].b, grads[l].b);
    }
}

void ScalarAdam::step(double& param, double grad) {
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad * grad;
    const double m_hat = m_ / (1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
    const double v_hat = v_ / (1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
    param -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
}

double clip_grad_norm(std::vector<LayerParam>& grads, double max_norm) {
    double sq = 0.0;
    for (const LayerParam& g : grads) {
        sq += g.w.squaredNorm() + g.b.squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (LayerParam& g : grads) {
            g.w *= scale;
            g.b *= scale;
        }
    }
    return norm;
}

void soft_update(std::vector<LayerParam>& target, const std::vector<LayerParam>& online,
                 double tau) {
    check_shapes(target, online, "soft_update");
    for (std::size_t l = 0; l < target.size(); ++l) {
        target[l].w = (1.0 - tau) * target[l].w + tau * online[l].w;
        target[l].b = (1.0 - tau) * target[l].b + tau * online[l].b;
    }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
    soft_update(target.layers(), online.layers(), tau);
}

}  // namespace imvol
