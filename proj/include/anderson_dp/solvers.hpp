#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "anderson_dp/anderson.hpp"
#include "anderson_dp/mdp.hpp"

namespace anderson_dp {

enum class Algorithm { VI, AndersonVI, RelativeVI, AndersonRelativeVI };

/// Short CLI/CSV name: vi, avi, rvi, arvi.
std::string_view algorithm_name(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);
bool is_accelerated(Algorithm algorithm);
bool is_relative(Algorithm algorithm);

struct SolverTrace {
    Algorithm algorithm = Algorithm::VI;
    std::size_t m = 0;  // 0 for the unaccelerated schemes
    std::vector<ValueFunction> iterates;
    std::vector<AlphaSolution> alpha_history;
};

struct RelativeViConfig {
    std::size_t anchor_state = 0;
};

/// v_{k+1} = T v_k.
SolverTrace value_iteration(const Mdp& mdp, const ValueFunction& v0, std::size_t num_iters);

/// Anderson mixing on T with memory m. m = 0 degenerates to value_iteration.
SolverTrace anderson_vi(const Mdp& mdp, const ValueFunction& v0, std::size_t m, std::size_t num_iters,
                        double lambda_rel = kDefaultLambdaRel);

/// v_{k+1} = T v_k - (T v_k)(s0) 1; every iterate after v_0 is zero at s0.
SolverTrace relative_value_iteration(const Mdp& mdp, const ValueFunction& v0,
                                     const RelativeViConfig& config, std::size_t num_iters);

/// Anderson mixing on the anchored operator v -> Tv - (Tv)(s0) 1.
SolverTrace anderson_relative_vi(const Mdp& mdp, const ValueFunction& v0,
                                 const RelativeViConfig& config, std::size_t m, std::size_t num_iters,
                                 double lambda_rel = kDefaultLambdaRel);

/// Dispatch on algorithm; m is ignored by the unaccelerated schemes.
SolverTrace run_solver(Algorithm algorithm, const Mdp& mdp, const ValueFunction& v0, std::size_t m,
                       std::size_t num_iters, double lambda_rel = kDefaultLambdaRel,
                       const RelativeViConfig& config = {});

/// ||v* - v_k||_1 / ||v*||_1. Throws std::domain_error if v* is zero.
double normalized_error(const ValueFunction& v_star, const ValueFunction& v_k);

/// Normalized l1 gap between v* and the exact value of the greedy policy of v_k.
double greedy_policy_error(const Mdp& mdp, const ValueFunction& v_star, const ValueFunction& v_k);

}  // namespace anderson_dp
