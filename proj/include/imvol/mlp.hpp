#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "imvol/rng.hpp"

namespace imvol {

enum class Activation { Identity, Relu, Tanh };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

/// One dense layer's parameters (or their gradients — same shapes).
/// w is n_out x n_in, b is n_out.
struct LayerParam {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
};

/// Intermediates cached by forward() so backward() can produce exact
/// gradients. `post[l]` is layer l's activated output; `post.back()` is the
/// network output. Inputs/outputs are column-major n x B (one column per
/// batch element) throughout.
struct ForwardTrace {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> post;
};

// Dense feed-forward network: ReLU hidden layers and a configurable output
// head (Identity for critics and Gaussian-parameter pairs, Tanh for the
// deterministic actor). Exact backprop, no autodiff.
class Mlp {
public:
    Mlp() = default;

    /// sizes = [n_in, hidden..., n_out]; hidden layers use ReLU.
    Mlp(std::vector<int> sizes, Activation output_activation);

    /// Uniform init in +-1/sqrt(fan_in) per layer (weights and biases).
    void init_uniform(Rng& rng);
    void zero();

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, ForwardTrace& trace) const;

    /// Gradients of the scalar whose d/d(output) is `upstream` (n_out x B).
    /// Fills `grads` (shaped like layers()) and returns d/d(input).
    Eigen::MatrixXd backward(const ForwardTrace& trace, const Eigen::MatrixXd& upstream,
                             std::vector<LayerParam>& grads) const;

    std::vector<LayerParam>& layers() { return layers_; }
    const std::vector<LayerParam>& layers() const { return layers_; }
    const std::vector<int>& sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    Activation output_activation() const { return output_activation_; }

    /// Total parameter count: sum over layers of (n_in + 1) * n_out.
    std::size_t param_count() const;

    /// Zero-valued gradient accumulator shaped like this network.
    std::vector<LayerParam> zero_grads() const;

    nlohmann::json to_json() const;
    static Mlp from_json(const nlohmann::json& doc);

private:
    std::vector<int> sizes_;
    Activation output_activation_ = Activation::Identity;
    std::vector<LayerParam> layers_;
};

}  // namespace imvol
