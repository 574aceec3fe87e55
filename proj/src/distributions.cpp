#include "imvol/distributions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace imvol {

namespace {

constexpr double kHalfLog2Pi = 0.5 * 1.8378770664093454836;  // 0.5 * ln(2*pi)

// tanh saturates to exactly +-1.0 in double precision past |x| ~ 19; pulling
// u back inside the open interval keeps actions strictly inside (0,1). The
// squash gradient there is ~2e-15, i.e. zero for every practical purpose,
// which matches the saturated regime.
constexpr double kTanhBound = 1.0 - 1e-15;

}  // namespace

SquashedSample gaussian_tanh_sample(const Eigen::MatrixXd& mean,
                                    const Eigen::MatrixXd& log_std, Rng& rng) {
    if (mean.rows() != log_std.rows() || mean.cols() != log_std.cols()) {
        throw std::domain_error("gaussian_tanh_sample: mean/log_std shape mismatch");
    }
    const Eigen::Index n = mean.rows();
    const Eigen::Index batch = mean.cols();

    SquashedSample s;
    const Eigen::ArrayXXd clamped =
        log_std.array().max(kLogStdMin).min(kLogStdMax);
    s.clamp_pass = (log_std.array() >= kLogStdMin && log_std.array() <= kLogStdMax)
                       .cast<double>();
    s.std = clamped.exp().matrix();

    s.noise.resize(n, batch);
    for (Eigen::Index j = 0; j < batch; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            s.noise(i, j) = rng.normal();
        }
    }

    const Eigen::ArrayXXd x = mean.array() + s.std.array() * s.noise.array();
    s.u = x.tanh().max(-kTanhBound).min(kTanhBound).matrix();
    s.action = ((s.u.array() + 1.0) * 0.5).matrix();

    // log N(x; mean, std) summed over rows, minus the tanh Jacobian, plus
    // n*ln2 for the (u+1)/2 map whose derivative is 1/2 per coordinate.
    const Eigen::ArrayXXd per_entry =
        -0.5 * s.noise.array().square() - clamped - kHalfLog2Pi -
        (1.0 - s.u.array().square() + kSquashEps).log();
    s.log_prob = per_entry.colwise().sum().matrix() +
                 Eigen::RowVectorXd::Constant(batch, static_cast<double>(n) * std::numbers::ln2);
    return s;
}

Eigen::MatrixXd squashed_mean(const Eigen::MatrixXd& mean) {
    return ((mean.array().tanh().max(-kTanhBound).min(kTanhBound) + 1.0) * 0.5).matrix();
}

void gaussian_tanh_backward(const SquashedSample& sample, const Eigen::MatrixXd& d_action,
                            const Eigen::RowVectorXd& d_log_prob, Eigen::MatrixXd& d_mean,
                            Eigen::MatrixXd& d_log_std) {
    const Eigen::ArrayXXd u = sample.u.array();
    const Eigen::ArrayXXd one_minus_u2 = 1.0 - u.square();
    // d(action)/dx = (1 - u^2)/2; d(log_prob)/dx = 2u(1-u^2)/(1-u^2+eps)
    const Eigen::ArrayXXd da_dx = one_minus_u2 * 0.5;
    const Eigen::ArrayXXd dlp_dx = 2.0 * u * one_minus_u2 / (one_minus_u2 + kSquashEps);
    // Broadcast the per-column log_prob gradient across rows.
    const Eigen::ArrayXXd lp = d_log_prob.replicate(sample.u.rows(), 1).array();

    const Eigen::ArrayXXd dx = d_action.array() * da_dx + lp * dlp_dx;
    // x = mean + std * noise: dx/d(mean) = 1, dx/d(log_std) = std * noise.
    // log_prob also depends on log_std directly through the -log_std term.
    d_mean = dx.matrix();
    d_log_std = ((dx * sample.std.array() * sample.noise.array() - lp) * sample.clamp_pass)
                    .matrix();
}

double squashed_log_density(double a, double mean, double log_std) {
    if (!(a > 0.0 && a < 1.0)) {
        throw std::domain_error("squashed_log_density: action must lie in (0,1)");
    }
    const double clamped = std::min(std::max(log_std, kLogStdMin), kLogStdMax);
    const double u = 2.0 * a - 1.0;
    const double x = std::atanh(u);
    const double xi = (x - mean) / std::exp(clamped);
    return -0.5 * xi * xi - clamped - kHalfLog2Pi - std::log(1.0 - u * u + kSquashEps) +
           std::numbers::ln2;
}

}  // namespace imvol
