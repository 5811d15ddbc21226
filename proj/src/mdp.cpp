#include "anderson_dp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace anderson_dp {

namespace detail {

void check_dimension(const Mdp& mdp, const ValueFunction& v, const char* where) {
    if (static_cast<std::size_t>(v.size()) != mdp.num_states()) {
        throw std::invalid_argument(fmt::format("{}: value function has length {}, MDP has {} states",
                                                where, v.size(), mdp.num_states()));
    }
}

void check_dimension(const Mdp& mdp, const Policy& policy, const char* where) {
    if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
        throw std::invalid_argument(fmt::format("{}: policy is {}x{}, MDP is {}x{}", where,
                                                policy.num_states(), policy.num_actions(),
                                                mdp.num_states(), mdp.num_actions()));
    }
}

}  // namespace detail

namespace {

constexpr double kDistributionTolerance = 1e-12;

// Q(s,a) for one cell.
inline double q_value(const Mdp& mdp, std::size_t s, std::size_t a, const ValueFunction& v) {
    double expected = 0.0;
    for (const auto& t : mdp.successors(s, a)) {
        expected += t.probability * v[t.next_state];
    }
    return mdp.reward(s, a) + mdp.gamma() * expected;
}

}  // namespace

Mdp::Mdp(std::size_t num_states, std::size_t num_actions,
         const std::vector<std::vector<Transition>>& successors, std::vector<double> rewards,
         double gamma)
    : num_states_(num_states), num_actions_(num_actions), gamma_(gamma), rewards_(std::move(rewards)) {
    if (num_states == 0 || num_actions == 0) {
        throw std::invalid_argument("Mdp: state and action spaces must be nonempty");
    }
    if (num_states > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("Mdp: too many states");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument(fmt::format("Mdp: gamma must lie in (0,1), got {}", gamma));
    }
    const std::size_t cells = num_states * num_actions;
    if (successors.size() != cells || rewards_.size() != cells) {
        throw std::invalid_argument(fmt::format(
            "Mdp: expected {} cells, got {} successor lists and {} rewards", cells,
            successors.size(), rewards_.size()));
    }

    offsets_.reserve(cells + 1);
    offsets_.push_back(0);
    for (std::size_t c = 0; c < cells; ++c) {
        const auto& row = successors[c];
        if (row.empty()) {
            throw std::invalid_argument(fmt::format("Mdp: cell ({}, {}) has no successors",
                                                    c / num_actions, c % num_actions));
        }
        double total = 0.0;
        for (const auto& t : row) {
            if (t.next_state >= num_states) {
                throw std::invalid_argument(fmt::format("Mdp: successor {} out of range in cell ({}, {})",
                                                        t.next_state, c / num_actions, c % num_actions));
            }
            if (!(t.probability > 0.0)) {
                throw std::invalid_argument(fmt::format("Mdp: non-positive probability in cell ({}, {})",
                                                        c / num_actions, c % num_actions));
            }
            total += t.probability;
            transitions_.push_back(t);
        }
        if (std::abs(total - 1.0) > kDistributionTolerance) {
            throw std::invalid_argument(fmt::format("Mdp: probabilities of cell ({}, {}) sum to {:.17g}",
                                                    c / num_actions, c % num_actions, total));
        }
        if (!std::isfinite(rewards_[c])) {
            throw std::invalid_argument("Mdp: rewards must be finite");
        }
        max_abs_reward_ = std::max(max_abs_reward_, std::abs(rewards_[c]));
        offsets_.push_back(transitions_.size());
    }
}

Policy::Policy(Matrix probabilities) : probs_(std::move(probabilities)) {
    if (probs_.rows() == 0 || probs_.cols() == 0) {
        throw std::invalid_argument("Policy: empty probability table");
    }
    for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
        if ((probs_.row(s).array() < 0.0).any() || !probs_.row(s).allFinite()) {
            throw std::invalid_argument(fmt::format("Policy: state {} has a negative probability", s));
        }
        if (std::abs(probs_.row(s).sum() - 1.0) > kDistributionTolerance) {
            throw std::invalid_argument(fmt::format("Policy: state {} does not sum to one", s));
        }
    }
}

Policy Policy::deterministic(const std::vector<std::size_t>& actions, std::size_t num_actions) {
    Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(actions.size()),
                                static_cast<Eigen::Index>(num_actions));
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] >= num_actions) {
            throw std::invalid_argument(fmt::format("Policy: action {} out of range", actions[s]));
        }
        probs(s, actions[s]) = 1.0;
    }
    return Policy(std::move(probs));
}

Policy Policy::uniform(std::size_t num_states, std::size_t num_actions) {
    return Policy(Matrix::Constant(num_states, num_actions, 1.0 / static_cast<double>(num_actions)));
}

std::optional<std::vector<std::size_t>> Policy::deterministic_actions() const {
    std::vector<std::size_t> actions(num_states());
    for (std::size_t s = 0; s < num_states(); ++s) {
        Eigen::Index best = 0;
        if (probs_.row(s).maxCoeff(&best) != 1.0) return std::nullopt;
        actions[s] = static_cast<std::size_t>(best);
    }
    return actions;
}

InducedKernels induced_kernels(const Mdp& mdp, const Policy& policy) {
    detail::check_dimension(mdp, policy, "induced_kernels");
    const auto n = mdp.num_states();
    InducedKernels k{Vector::Zero(n), Matrix::Zero(n, n)};
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            const double p = policy.probability(s, a);
            if (p == 0.0) continue;
            k.reward[s] += p * mdp.reward(s, a);
            for (const auto& t : mdp.successors(s, a)) {
                k.transition(s, t.next_state) += p * t.probability;
            }
        }
    }
    return k;
}

ValueFunction bellman_eval(const Mdp& mdp, const Policy& policy, const ValueFunction& v) {
    detail::check_dimension(mdp, policy, "bellman_eval");
    detail::check_dimension(mdp, v, "bellman_eval");
    ValueFunction out(v.size());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            const double p = policy.probability(s, a);
            if (p != 0.0) total += p * q_value(mdp, s, a, v);
        }
        out[s] = total;
    }
    return out;
}

ValueFunction bellman_opt(const Mdp& mdp, const ValueFunction& v) {
    detail::check_dimension(mdp, v, "bellman_opt");
    ValueFunction out(v.size());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        double best = q_value(mdp, s, 0, v);
        for (std::size_t a = 1; a < mdp.num_actions(); ++a) {
            best = std::max(best, q_value(mdp, s, a, v));
        }
        out[s] = best;
    }
    return out;
}

double tie_tolerance(const Mdp& mdp, const ValueFunction& v) {
    const double scale = mdp.max_abs_reward() + mdp.gamma() * v.cwiseAbs().maxCoeff();
    return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

std::vector<std::size_t> greedy_actions(const Mdp& mdp, const ValueFunction& v) {
    detail::check_dimension(mdp, v, "greedy_policy");
    const double tol = tie_tolerance(mdp, v);
    std::vector<double> q(mdp.num_actions());
    std::vector<std::size_t> actions(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) q[a] = q_value(mdp, s, a, v);
        const double best = *std::max_element(q.begin(), q.end());
        std::size_t a = 0;
        while (q[a] < best - tol) ++a;
        actions[s] = a;
    }
    return actions;
}

Policy greedy_policy(const Mdp& mdp, const ValueFunction& v) {
    return Policy::deterministic(greedy_actions(mdp, v), mdp.num_actions());
}

ValueFunction exact_policy_value(const Mdp& mdp, const Policy& policy) {
    const auto k = induced_kernels(mdp, policy);
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    const Matrix system = Matrix::Identity(n, n) - mdp.gamma() * k.transition;
    const Eigen::PartialPivLU<Matrix> lu(system);
    ValueFunction v = lu.solve(k.reward);
    if (!v.allFinite()) {
        throw NumericError("exact_policy_value: linear solve produced non-finite values");
    }
    const double residual = (v - bellman_eval(mdp, policy, v)).cwiseAbs().maxCoeff();
    if (residual > 1e-9 * (1.0 + v.cwiseAbs().maxCoeff())) {
        throw NumericError(fmt::format("exact_policy_value: residual {:.3g} exceeds tolerance", residual));
    }
    return v;
}

OptimalSolution optimal_value_oracle(const Mdp& mdp, std::size_t max_steps) {
    std::vector<std::size_t> actions = greedy_actions(mdp, ValueFunction::Zero(mdp.num_states()));
    std::vector<double> q(mdp.num_actions());
    for (std::size_t step = 1; step <= max_steps; ++step) {
        const auto policy = Policy::deterministic(actions, mdp.num_actions());
        ValueFunction v = exact_policy_value(mdp, policy);

        // Switch only on a strict improvement so roundoff cannot make the iteration cycle.
        const double tol = tie_tolerance(mdp, v);
        bool changed = false;
        for (std::size_t s = 0; s < mdp.num_states(); ++s) {
            for (std::size_t a = 0; a < mdp.num_actions(); ++a) q[a] = q_value(mdp, s, a, v);
            const double best = *std::max_element(q.begin(), q.end());
            if (best > q[actions[s]] + tol) {
                std::size_t a = 0;
                while (q[a] < best - tol) ++a;
                actions[s] = a;
                changed = true;
            }
        }
        if (!changed) {
            const double residual = (v - bellman_opt(mdp, v)).cwiseAbs().maxCoeff();
            if (residual > 1e-9 * (1.0 + v.cwiseAbs().maxCoeff())) {
                throw NumericError(
                    fmt::format("optimal_value_oracle: Bellman residual {:.3g} at termination", residual));
            }
            return {std::move(v), policy, step};
        }
    }
    throw NumericError(fmt::format("optimal_value_oracle: no stable policy after {} steps", max_steps));
}

}  // namespace anderson_dp
