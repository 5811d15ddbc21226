#include "anderson_dp/bellman_parallel.hpp"

#include <algorithm>

#include <omp.h>

namespace anderson_dp {

namespace {

inline double q_value(const Mdp& mdp, std::size_t s, std::size_t a, const ValueFunction& v) {
    double expected = 0.0;
    for (const auto& t : mdp.successors(s, a)) {
        expected += t.probability * v[t.next_state];
    }
    return mdp.reward(s, a) + mdp.gamma() * expected;
}

}  // namespace

ValueFunction bellman_opt_parallel(const Mdp& mdp, const ValueFunction& v) {
    detail::check_dimension(mdp, v, "bellman_opt_parallel");
    ValueFunction out(v.size());
    const auto n = static_cast<std::int64_t>(mdp.num_states());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        double best = q_value(mdp, s, 0, v);
        for (std::size_t a = 1; a < mdp.num_actions(); ++a) {
            best = std::max(best, q_value(mdp, s, a, v));
        }
        out[i] = best;
    }
    return out;
}

ValueFunction bellman_eval_parallel(const Mdp& mdp, const Policy& policy, const ValueFunction& v) {
    detail::check_dimension(mdp, policy, "bellman_eval_parallel");
    detail::check_dimension(mdp, v, "bellman_eval_parallel");
    ValueFunction out(v.size());
    const auto n = static_cast<std::int64_t>(mdp.num_states());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        double total = 0.0;
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            const double p = policy.probability(s, a);
            if (p != 0.0) total += p * q_value(mdp, s, a, v);
        }
        out[i] = total;
    }
    return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace anderson_dp
