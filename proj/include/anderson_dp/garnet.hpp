#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "anderson_dp/mdp.hpp"

namespace anderson_dp {

/**
 * Garnet G(num_states, num_actions, branching) with a sparse state reward.
 *
 * round(reward_fraction * num_states) states (half away from zero) receive a
 * reward drawn uniformly in (reward_low, reward_high), shared by all actions
 * of that state. All other rewards are zero.
 */
struct GarnetSpec {
    std::size_t num_states = 100;
    std::size_t num_actions = 4;
    std::size_t branching = 3;
    double reward_fraction = 0.1;
    double reward_low = 1.0;
    double reward_high = 2.0;
    double gamma = 0.99;
    std::uint64_t seed = 0;
};

/**
 * Draw source for Garnet generation.
 *
 * Wraps std::mt19937_64, whose output sequence is fixed by the C++ standard,
 * and derives every variate from raw 64-bit outputs so the stream does not
 * depend on the standard library's distribution implementations:
 *
 *  - below(n): x % n after rejecting x < (2^64 - n) mod n.
 *  - open_unit(): ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
 */
class GarnetRng {
public:
    explicit GarnetRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    std::size_t below(std::size_t n);
    double open_unit();

private:
    std::mt19937_64 engine_;
};

/// Chooses k distinct indices from [0, n) by a partial Fisher-Yates shuffle of
/// `scratch`, which must hold a permutation of [0, n); `scratch` is restored
/// before returning. Indices are returned in draw order.
std::vector<std::size_t> sample_without_replacement(GarnetRng& rng, std::vector<std::size_t>& scratch,
                                                    std::size_t k);

/// Gaps between sorted cut points; k - 1 cuts partition (0, 1) into k positive pieces.
std::vector<double> partition_unit_interval(GarnetRng& rng, std::size_t k);

/// Deterministic in spec. Draw order: reward states, reward values in
/// ascending state order, then for each (s, a) row-major the successor set
/// followed by its cut points.
Mdp generate_garnet(const GarnetSpec& spec);

/// States whose reward is nonzero, i.e. round(fraction * num_states), half away from zero.
std::size_t reward_state_count(const GarnetSpec& spec);

}  // namespace anderson_dp
