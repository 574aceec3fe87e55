#pragma once

#include <vector>

#include <Eigen/Dense>

#include "imvol/rng.hpp"

namespace imvol {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEps = 1e-6;

// One reparameterized draw from the squashed Gaussian policy head, batched
// column-wise (n x B). Construction: clamp log_std to [kLogStdMin,
// kLogStdMax], x = mean + std * noise, u = tanh(x), action = (u + 1) / 2 in
// (0,1). log_prob per column is the Gaussian log-density of x minus
// sum(log(1 - u^2 + eps)) plus n*ln 2 from the affine map (its derivative is
// 1/2, so the density gains a factor 2 per coordinate). Caches noise/std/u
// plus the clamp mask so the analytic backward pass is exact.
struct SquashedSample {
    Eigen::MatrixXd action;
    Eigen::RowVectorXd log_prob;
    Eigen::MatrixXd noise;       // xi, standard normal
    Eigen::MatrixXd std;         // exp(clamped log_std)
    Eigen::MatrixXd u;           // tanh(mean + std * noise)
    Eigen::ArrayXXd clamp_pass;  // 1 where log_std was inside the clamp range
};

/// Reparameterized sample. Noise is drawn column-by-column (all rows of
/// sample 0, then sample 1, ...), which tests replicating the stream rely on.
SquashedSample gaussian_tanh_sample(const Eigen::MatrixXd& mean,
                                    const Eigen::MatrixXd& log_std, Rng& rng);

/// Deterministic evaluation action: (tanh(mean) + 1) / 2.
Eigen::MatrixXd squashed_mean(const Eigen::MatrixXd& mean);

/// Computes d(loss)/d(mean) and d(loss)/d(log_std) for a cached sample,
/// given the loss gradients w.r.t. the action entries and the per-column
/// log_prob. Gradients w.r.t. log_std are zeroed where the clamp saturated.
void gaussian_tanh_backward(const SquashedSample& sample, const Eigen::MatrixXd& d_action,
                            const Eigen::RowVectorXd& d_log_prob, Eigen::MatrixXd& d_mean,
                            Eigen::MatrixXd& d_log_std);

/// Scalar log-density of the squashed-Gaussian action value `a` in (0,1)
/// under (mean, log_std); used by oracle tests via direct quadrature.
double squashed_log_density(double a, double mean, double log_std);

}  // namespace imvol
