#pragma once

#include "anderson_dp/mdp.hpp"

namespace anderson_dp {

/// OpenMP version of bellman_opt. Each state is computed exactly as in the
/// serial kernel, so results are bitwise identical for any thread count.
ValueFunction bellman_opt_parallel(const Mdp& mdp, const ValueFunction& v);

/// OpenMP version of bellman_eval, bitwise identical to the serial kernel.
ValueFunction bellman_eval_parallel(const Mdp& mdp, const Policy& policy, const ValueFunction& v);

/// Worker count used by OpenMP regions in this library.
int max_threads();

}  // namespace anderson_dp
