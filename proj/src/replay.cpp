#include "imvol/replay.hpp"

#include <stdexcept>

namespace imvol {

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    storage_.resize(capacity);
}

void ReplayBuffer::push(Transition t) {
    storage_[head_] = std::move(t);
    head_ = (head_ + 1) % storage_.size();
    if (count_ < storage_.size()) ++count_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= count_) throw std::out_of_range("ReplayBuffer::at: index past stored count");
    const std::size_t start = (head_ + storage_.size() - count_) % storage_.size();
    return storage_[(start + i) % storage_.size()];
}

std::optional<Batch> ReplayBuffer::sample_batch(std::size_t batch, Rng& rng) const {
    if (batch == 0 || count_ < batch) return std::nullopt;
    const Transition& probe = at(0);
    const Eigen::Index state_dim = static_cast<Eigen::Index>(probe.state.size());
    const Eigen::Index action_dim = static_cast<Eigen::Index>(probe.action.size());
    Batch out;
    out.states.resize(state_dim, static_cast<Eigen::Index>(batch));
    out.actions.resize(action_dim, static_cast<Eigen::Index>(batch));
    out.rewards.resize(static_cast<Eigen::Index>(batch));
    out.next_states.resize(state_dim, static_cast<Eigen::Index>(batch));
    for (std::size_t j = 0; j < batch; ++j) {
        const Transition& t = at(rng.index(count_));
        const Eigen::Index col = static_cast<Eigen::Index>(j);
        out.states.col(col) = Eigen::Map<const Eigen::VectorXd>(t.state.data(), state_dim);
        out.actions.col(col) = Eigen::Map<const Eigen::VectorXd>(t.action.data(), action_dim);
        out.rewards(col) = t.reward;
        out.next_states.col(col) =
            Eigen::Map<const Eigen::VectorXd>(t.next_state.data(), state_dim);
    }
    return out;
}

}  // namespace imvol
