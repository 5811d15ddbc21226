#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace anderson_dp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A value function: one real per state.
using ValueFunction = Vector;

/// Raised when a numerical routine cannot produce a trustworthy result
/// (singular solve, residual check failed, non-terminating iteration).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Transition {
    std::uint32_t next_state;
    double probability;

    bool operator==(const Transition&) const = default;
};

/**
 * Finite discounted MDP with a sparse transition kernel.
 *
 * Successor lists are stored contiguously, one slice per (state, action) cell
 * in row-major order (cell index = s * num_actions + a). Immutable after
 * construction; the constructor validates every invariant.
 */
class Mdp {
public:
    /// `successors[s * num_actions + a]` lists P(.|s,a); `rewards` uses the same cell order.
    Mdp(std::size_t num_states, std::size_t num_actions,
        const std::vector<std::vector<Transition>>& successors,
        std::vector<double> rewards, double gamma);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    double gamma() const { return gamma_; }

    double reward(std::size_t s, std::size_t a) const { return rewards_[cell(s, a)]; }
    std::span<const Transition> successors(std::size_t s, std::size_t a) const {
        const auto c = cell(s, a);
        return {transitions_.data() + offsets_[c], offsets_[c + 1] - offsets_[c]};
    }

    /// Largest |R(s,a)|.
    double max_abs_reward() const { return max_abs_reward_; }

    bool operator==(const Mdp&) const = default;

private:
    std::size_t cell(std::size_t s, std::size_t a) const { return s * num_actions_ + a; }

    std::size_t num_states_;
    std::size_t num_actions_;
    double gamma_;
    std::vector<double> rewards_;
    std::vector<std::size_t> offsets_;
    std::vector<Transition> transitions_;
    double max_abs_reward_ = 0.0;
};

/// Per-state distribution over actions, stored densely (states x actions).
class Policy {
public:
    explicit Policy(Matrix probabilities);

    static Policy deterministic(const std::vector<std::size_t>& actions, std::size_t num_actions);
    static Policy uniform(std::size_t num_states, std::size_t num_actions);

    std::size_t num_states() const { return static_cast<std::size_t>(probs_.rows()); }
    std::size_t num_actions() const { return static_cast<std::size_t>(probs_.cols()); }
    double probability(std::size_t s, std::size_t a) const { return probs_(s, a); }
    const Matrix& probabilities() const { return probs_; }

    /// The chosen action per state if every row is a point mass, otherwise nullopt.
    std::optional<std::vector<std::size_t>> deterministic_actions() const;

    bool operator==(const Policy& other) const { return probs_ == other.probs_; }

private:
    Matrix probs_;
};

struct InducedKernels {
    Vector reward;   // R_pi(s)
    Matrix transition;  // P_pi(s'|s), row-stochastic
};

InducedKernels induced_kernels(const Mdp& mdp, const Policy& policy);

/// T_pi v = R_pi + gamma P_pi v.
ValueFunction bellman_eval(const Mdp& mdp, const Policy& policy, const ValueFunction& v);

/// (Tv)(s) = max_a [R(s,a) + gamma sum_s' P(s'|s,a) v(s')]. Serial reference kernel.
ValueFunction bellman_opt(const Mdp& mdp, const ValueFunction& v);

/// Action attaining the max in bellman_opt per state, lowest index among ties.
///
/// Two Q-values are a tie when they differ by less than `tie_tolerance(mdp, v)`,
/// a bound on the rounding error of the Q-value sums. This keeps the argmax
/// identical for v and v + c·1.
std::vector<std::size_t> greedy_actions(const Mdp& mdp, const ValueFunction& v);
Policy greedy_policy(const Mdp& mdp, const ValueFunction& v);
double tie_tolerance(const Mdp& mdp, const ValueFunction& v);

/// v_pi by a dense LU solve of (I - gamma P_pi) v = R_pi.
ValueFunction exact_policy_value(const Mdp& mdp, const Policy& policy);

struct OptimalSolution {
    ValueFunction value;
    Policy policy;
    std::size_t improvement_steps;
};

/// Policy iteration; terminates when no action improves on the current one
/// by more than the tie tolerance.
OptimalSolution optimal_value_oracle(const Mdp& mdp, std::size_t max_steps = 10'000);

namespace detail {
void check_dimension(const Mdp& mdp, const ValueFunction& v, const char* where);
void check_dimension(const Mdp& mdp, const Policy& policy, const char* where);
}  // namespace detail

}  // namespace anderson_dp
