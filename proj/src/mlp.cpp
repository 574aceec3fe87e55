#include "imvol/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace imvol {

std::string to_string(Activation act) {
    switch (act) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
    }
    throw std::logic_error("unreachable activation");
}

Activation activation_from_string(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

namespace {

void apply_activation(Activation act, Eigen::MatrixXd& m) {
    switch (act) {
        case Activation::Identity: return;
        case Activation::Relu:
            m = m.cwiseMax(0.0);
            return;
        case Activation::Tanh:
            m = m.array().tanh().matrix();
            return;
    }
}

// dL/dpre from dL/dpost, using the cached pre/post activations.
Eigen::MatrixXd activation_backward(Activation act, const Eigen::MatrixXd& pre,
                                    const Eigen::MatrixXd& post,
                                    const Eigen::MatrixXd& d_post) {
    switch (act) {
        case Activation::Identity: return d_post;
        case Activation::Relu:
            return (pre.array() > 0.0).select(d_post, 0.0);
        case Activation::Tanh:
            return (d_post.array() * (1.0 - post.array().square())).matrix();
    }
    throw std::logic_error("unreachable activation");
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes, Activation output_activation)
    : sizes_(std::move(sizes)), output_activation_(output_activation) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
    for (int n : sizes_) {
        if (n < 1) throw std::invalid_argument("Mlp layer sizes must be positive");
    }
    layers_.resize(sizes_.size() - 1);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        layers_[l].w = Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]);
        layers_[l].b = Eigen::VectorXd::Zero(sizes_[l + 1]);
    }
}

void Mlp::init_uniform(Rng& rng) {
    for (LayerParam& layer : layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.w.cols()));
        for (Eigen::Index j = 0; j < layer.w.cols(); ++j) {
            for (Eigen::Index i = 0; i < layer.w.rows(); ++i) {
                layer.w(i, j) = rng.uniform(-bound, bound);
            }
        }
        for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
            layer.b(i) = rng.uniform(-bound, bound);
        }
    }
}

void Mlp::zero() {
    for (LayerParam& layer : layers_) {
        layer.w.setZero();
        layer.b.setZero();
    }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
    ForwardTrace trace;
    return forward(x, trace);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, ForwardTrace& trace) const {
    if (x.rows() != sizes_.front()) {
        throw std::domain_error("Mlp::forward: input has " + std::to_string(x.rows()) +
                                " rows, expected " + std::to_string(sizes_.front()));
    }
    trace.input = x;
    trace.pre.resize(layers_.size());
    trace.post.resize(layers_.size());
    const Eigen::MatrixXd* current = &trace.input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        trace.pre[l] = (layers_[l].w * (*current)).colwise() + layers_[l].b;
        trace.post[l] = trace.pre[l];
        const Activation act = l + 1 == layers_.size() ? output_activation_ : Activation::Relu;
        apply_activation(act, trace.post[l]);
        current = &trace.post[l];
    }
    return trace.post.back();
}

Eigen::MatrixXd Mlp::backward(const ForwardTrace& trace, const Eigen::MatrixXd& upstream,
                              std::vector<LayerParam>& grads) const {
    if (trace.post.size() != layers_.size()) {
        throw std::logic_error("Mlp::backward: trace does not match network depth");
    }
    if (upstream.rows() != sizes_.back() || upstream.cols() != trace.input.cols()) {
        throw std::domain_error("Mlp::backward: upstream gradient shape mismatch");
    }
    grads.resize(layers_.size());
    Eigen::MatrixXd d_post = upstream;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const Activation act = l + 1 == layers_.size() ? output_activation_ : Activation::Relu;
        const Eigen::MatrixXd d_pre =
            activation_backward(act, trace.pre[l], trace.post[l], d_post);
        const Eigen::MatrixXd& below = l == 0 ? trace.input : trace.post[l - 1];
        grads[l].w = d_pre * below.transpose();
        grads[l].b = d_pre.rowwise().sum();
        d_post = layers_[l].w.transpose() * d_pre;
    }
    return d_post;
}

std::size_t Mlp::param_count() const {
    std::size_t count = 0;
    for (const LayerParam& layer : layers_) {
        count += static_cast<std::size_t>((layer.w.cols() + 1) * layer.w.rows());
    }
    return count;
}

std::vector<LayerParam> Mlp::zero_grads() const {
    std::vector<LayerParam> grads(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        grads[l].w = Eigen::MatrixXd::Zero(layers_[l].w.rows(), layers_[l].w.cols());
        grads[l].b = Eigen::VectorXd::Zero(layers_[l].b.size());
    }
    return grads;
}

nlohmann::json Mlp::to_json() const {
    nlohmann::json doc;
    doc["sizes"] = sizes_;
    doc["output_activation"] = to_string(output_activation_);
    nlohmann::json layer_docs = nlohmann::json::array();
    for (const LayerParam& layer : layers_) {
        nlohmann::json entry;
        entry["n_out"] = layer.w.rows();
        entry["n_in"] = layer.w.cols();
        std::vector<double> w_row_major;
        w_row_major.reserve(static_cast<std::size_t>(layer.w.size()));
        for (Eigen::Index i = 0; i < layer.w.rows(); ++i) {
            for (Eigen::Index j = 0; j < layer.w.cols(); ++j) {
                w_row_major.push_back(layer.w(i, j));
            }
        }
        entry["w"] = std::move(w_row_major);
        entry["b"] = std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size());
        layer_docs.push_back(std::move(entry));
    }
    doc["layers"] = std::move(layer_docs);
    return doc;
}

Mlp Mlp::from_json(const nlohmann::json& doc) {
    Mlp net(doc.at("sizes").get<std::vector<int>>(),
            activation_from_string(doc.at("output_activation").get<std::string>()));
    const auto& layer_docs = doc.at("layers");
    if (layer_docs.size() != net.layers_.size()) {
        throw std::invalid_argument("Mlp::from_json: layer count does not match sizes");
    }
    for (std::size_t l = 0; l < net.layers_.size(); ++l) {
        const auto& entry = layer_docs[l];
        LayerParam& layer = net.layers_[l];
        if (entry.at("n_out").get<Eigen::Index>() != layer.w.rows() ||
            entry.at("n_in").get<Eigen::Index>() != layer.w.cols()) {
            throw std::invalid_argument("Mlp::from_json: layer shape mismatch");
        }
        const auto w = entry.at("w").get<std::vector<double>>();
        const auto b = entry.at("b").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(layer.w.size()) ||
            b.size() != static_cast<std::size_t>(layer.b.size())) {
            throw std::invalid_argument("Mlp::from_json: value count mismatch");
        }
        std::size_t k = 0;
        for (Eigen::Index i = 0; i < layer.w.rows(); ++i) {
            for (Eigen::Index j = 0; j < layer.w.cols(); ++j) {
                layer.w(i, j) = w[k++];
            }
        }
        for (Eigen::Index i = 0; i < layer.b.size(); ++i) layer.b(i) = b[static_cast<std::size_t>(i)];
    }
    return net;
}

}  // namespace imvol
