#include "anderson_dp/solvers.hpp"

#include <fmt/core.h>

namespace anderson_dp {

std::string_view algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::VI: return "vi";
        case Algorithm::AndersonVI: return "avi";
        case Algorithm::RelativeVI: return "rvi";
        case Algorithm::AndersonRelativeVI: return "arvi";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::VI, Algorithm::AndersonVI, Algorithm::RelativeVI,
                   Algorithm::AndersonRelativeVI}) {
        if (algorithm_name(a) == name) return a;
    }
    return std::nullopt;
}

bool is_accelerated(Algorithm algorithm) {
    return algorithm == Algorithm::AndersonVI || algorithm == Algorithm::AndersonRelativeVI;
}

bool is_relative(Algorithm algorithm) {
    return algorithm == Algorithm::RelativeVI || algorithm == Algorithm::AndersonRelativeVI;
}

namespace {

void check_anchor(const Mdp& mdp, const RelativeViConfig& config) {
    if (config.anchor_state >= mdp.num_states()) {
        throw std::invalid_argument(fmt::format("anchor state {} out of range for {} states",
                                                config.anchor_state, mdp.num_states()));
    }
}

FixedPointOperator optimality_operator(const Mdp& mdp) {
    return [&mdp](const Vector& v) { return bellman_opt(mdp, v); };
}

FixedPointOperator anchored_operator(const Mdp& mdp, std::size_t anchor) {
    return [&mdp, anchor](const Vector& v) {
        Vector w = bellman_opt(mdp, v);
        w.array() -= w[anchor];
        return w;
    };
}

SolverTrace to_solver_trace(Algorithm algorithm, std::size_t m, FixedPointTrace&& fp) {
    return {algorithm, m, std::move(fp.iterates), std::move(fp.alpha_history)};
}

}  // namespace

SolverTrace value_iteration(const Mdp& mdp, const ValueFunction& v0, std::size_t num_iters) {
    detail::check_dimension(mdp, v0, "value_iteration");
    return to_solver_trace(Algorithm::VI, 0, accelerate_fixed_point(optimality_operator(mdp), v0, 0, num_iters));
}

SolverTrace anderson_vi(const Mdp& mdp, const ValueFunction& v0, std::size_t m, std::size_t num_iters,
                        double lambda_rel) {
    detail::check_dimension(mdp, v0, "anderson_vi");
    return to_solver_trace(Algorithm::AndersonVI, m,
                           accelerate_fixed_point(optimality_operator(mdp), v0, m, num_iters, lambda_rel));
}

SolverTrace relative_value_iteration(const Mdp& mdp, const ValueFunction& v0,
                                     const RelativeViConfig& config, std::size_t num_iters) {
    detail::check_dimension(mdp, v0, "relative_value_iteration");
    check_anchor(mdp, config);
    return to_solver_trace(Algorithm::RelativeVI, 0,
                           accelerate_fixed_point(anchored_operator(mdp, config.anchor_state), v0, 0, num_iters));
}

SolverTrace anderson_relative_vi(const Mdp& mdp, const ValueFunction& v0,
                                 const RelativeViConfig& config, std::size_t m, std::size_t num_iters,
                                 double lambda_rel) {
    detail::check_dimension(mdp, v0, "anderson_relative_vi");
    check_anchor(mdp, config);
    return to_solver_trace(
        Algorithm::AndersonRelativeVI, m,
        accelerate_fixed_point(anchored_operator(mdp, config.anchor_state), v0, m, num_iters, lambda_rel));
}

SolverTrace run_solver(Algorithm algorithm, const Mdp& mdp, const ValueFunction& v0, std::size_t m,
                       std::size_t num_iters, double lambda_rel, const RelativeViConfig& config) {
    switch (algorithm) {
        case Algorithm::VI: return value_iteration(mdp, v0, num_iters);
        case Algorithm::AndersonVI: return anderson_vi(mdp, v0, m, num_iters, lambda_rel);
        case Algorithm::RelativeVI: return relative_value_iteration(mdp, v0, config, num_iters);
        case Algorithm::AndersonRelativeVI:
            return anderson_relative_vi(mdp, v0, config, m, num_iters, lambda_rel);
    }
    throw std::invalid_argument("run_solver: unknown algorithm");
}

double normalized_error(const ValueFunction& v_star, const ValueFunction& v_k) {
    if (v_star.size() != v_k.size()) {
        throw std::invalid_argument(fmt::format("normalized_error: lengths {} and {} differ",
                                                v_star.size(), v_k.size()));
    }
    const double scale = v_star.lpNorm<1>();
    if (scale == 0.0) throw std::domain_error("normalized_error: optimal value function is zero");
    return (v_star - v_k).lpNorm<1>() / scale;
}

double greedy_policy_error(const Mdp& mdp, const ValueFunction& v_star, const ValueFunction& v_k) {
    const auto value = exact_policy_value(mdp, greedy_policy(mdp, v_k));
    return normalized_error(v_star, value);
}

}  // namespace anderson_dp
