#pragma once

#include <cstddef>
#include <vector>

#include "wipad/dcf_model.hpp"

namespace wipad {

/// Explicit backoff Markov chain over states (stage, timer): the full
/// one-step transition matrix and its numerically computed stationary
/// distribution. This is the validation route for the closed-form chain
/// solution; tau_given() is the production route.
///
/// Transition rules, with p_f driving stage changes and p_coll freezing
/// the timer:
///   - timer k+1 -> k at the same stage with probability 1 - p_coll
///   - timer k -> k (frozen, k >= 1) with probability p_coll
///   - (i, 0) -> (0, k) uniform over W_0 with probability (1 - p_f) / W_0
///   - (i, 0) -> (i+1, k) uniform over W_{i+1} with probability p_f / W_{i+1}
///   - (m, 0) -> (0, k) uniform over W_0 (retry limit reached)
class BackoffChainOracle {
public:
    BackoffChainOracle(double p_f, double p_coll, const DcfParams& params);

    const std::vector<int>& window_schedule() const { return windows_; }
    std::size_t state_count() const { return offsets_.back(); }

    std::size_t index(int stage, int timer) const;

    /// Entry P[next | current] of the transition matrix.
    double transition(std::size_t from, std::size_t to) const;
    double row_sum(std::size_t from) const;

    /// Stationary occupancy of state (stage, timer).
    double stationary(int stage, int timer) const;
    const std::vector<double>& stationary_vector() const { return pi_; }

    /// Sum of the timer-zero occupancies: the chain's transmission
    /// probability.
    double tx_probability() const;

private:
    std::vector<int> windows_;           // W_0..W_m
    std::vector<std::size_t> offsets_;   // offsets_[i] = flat index of (i, 0)
    // Sparse rows of the transition matrix.
    struct Entry {
        std::size_t to;
        double prob;
    };
    std::vector<std::vector<Entry>> rows_;
    std::vector<double> pi_;

    void solve_stationary();
};

/// Builds the chain for the given failure/collision probabilities and
/// solves it. Throws std::invalid_argument on out-of-range probabilities
/// and std::runtime_error if the stationary solve degenerates.
BackoffChainOracle stationary_oracle(double p_f, double p_coll,
                                     const DcfParams& params);

}  // namespace wipad
