#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "imvol/rng.hpp"

namespace imvol {

/// One environment transition. The action is the raw policy vector (before
/// normalize_action) so the learners see exactly what they emitted.
struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
};

/// Column-major training batch: one column per sampled transition.
struct Batch {
    Eigen::MatrixXd states;
    Eigen::MatrixXd actions;
    Eigen::RowVectorXd rewards;
    Eigen::MatrixXd next_states;

    Eigen::Index size() const { return rewards.size(); }
};

// Fixed-capacity ring buffer with uniform with-replacement sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 10000);

    void push(Transition t);

    std::size_t size() const { return count_; }
    std::size_t capacity() const { return storage_.size(); }

    /// i-th oldest stored transition (0 = oldest surviving).
    const Transition& at(std::size_t i) const;

    /// Uniform sample of `batch` transitions with replacement, or nullopt
    /// when fewer than `batch` transitions are stored.
    std::optional<Batch> sample_batch(std::size_t batch, Rng& rng) const;

private:
    std::vector<Transition> storage_;
    std::size_t head_ = 0;   // next write position
    std::size_t count_ = 0;  // stored entries, <= capacity
};

}  // namespace imvol
