#include "anderson_dp/garnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace anderson_dp {

std::size_t GarnetRng::below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t x = next();
        if (x >= threshold) return static_cast<std::size_t>(x % bound);
    }
}

double GarnetRng::open_unit() {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(next() >> 11) + 0.5) * kScale;
}

std::vector<std::size_t> sample_without_replacement(GarnetRng& rng, std::vector<std::size_t>& scratch,
                                                    std::size_t k) {
    const std::size_t n = scratch.size();
    if (k > n) throw std::invalid_argument("sample_without_replacement: k exceeds population");
    std::vector<std::size_t> swaps(k);
    std::vector<std::size_t> picked(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(scratch[i], scratch[j]);
        swaps[i] = j;
        picked[i] = scratch[i];
    }
    for (std::size_t i = k; i-- > 0;) std::swap(scratch[i], scratch[swaps[i]]);
    return picked;
}

std::vector<double> partition_unit_interval(GarnetRng& rng, std::size_t k) {
    if (k == 0) throw std::invalid_argument("partition_unit_interval: need at least one piece");
    std::vector<double> cuts(k + 1);
    std::vector<double> gaps(k);
    while (true) {
        cuts.front() = 0.0;
        cuts.back() = 1.0;
        for (std::size_t i = 1; i < k; ++i) cuts[i] = rng.open_unit();
        std::sort(cuts.begin() + 1, cuts.end() - 1);
        bool positive = true;
        for (std::size_t i = 0; i < k; ++i) {
            gaps[i] = cuts[i + 1] - cuts[i];
            positive = positive && gaps[i] > 0.0;
        }
        // Repeated cut points have probability ~k^2 2^-54; redraw them.
        if (positive) return gaps;
    }
}

std::size_t reward_state_count(const GarnetSpec& spec) {
    return static_cast<std::size_t>(std::lround(spec.reward_fraction * static_cast<double>(spec.num_states)));
}

Mdp generate_garnet(const GarnetSpec& spec) {
    if (spec.num_states == 0 || spec.num_actions == 0) {
        throw std::invalid_argument("generate_garnet: state and action counts must be positive");
    }
    if (spec.branching < 1 || spec.branching > spec.num_states) {
        throw std::invalid_argument(fmt::format("generate_garnet: branching {} must lie in [1, {}]",
                                                spec.branching, spec.num_states));
    }
    if (!(spec.reward_fraction > 0.0 && spec.reward_fraction <= 1.0)) {
        throw std::invalid_argument("generate_garnet: reward_fraction must lie in (0, 1]");
    }
    if (!(spec.reward_low < spec.reward_high)) {
        throw std::invalid_argument("generate_garnet: reward_low must be below reward_high");
    }

    GarnetRng rng(spec.seed);
    const std::size_t n = spec.num_states;
    std::vector<std::size_t> scratch(n);
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});

    auto reward_states = sample_without_replacement(rng, scratch, reward_state_count(spec));
    std::sort(reward_states.begin(), reward_states.end());
    std::vector<double> state_reward(n, 0.0);
    for (const auto s : reward_states) {
        double r;
        do {
            r = spec.reward_low + (spec.reward_high - spec.reward_low) * rng.open_unit();
        } while (!(r > spec.reward_low && r < spec.reward_high));
        state_reward[s] = r;
    }

    const std::size_t cells = n * spec.num_actions;
    std::vector<std::vector<Transition>> successors(cells);
    std::vector<double> rewards(cells);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < spec.num_actions; ++a) {
            const std::size_t c = s * spec.num_actions + a;
            const auto next = sample_without_replacement(rng, scratch, spec.branching);
            const auto probs = partition_unit_interval(rng, spec.branching);
            auto& row = successors[c];
            row.reserve(spec.branching);
            for (std::size_t i = 0; i < spec.branching; ++i) {
                row.push_back({static_cast<std::uint32_t>(next[i]), probs[i]});
            }
            rewards[c] = state_reward[s];
        }
    }
    return Mdp(n, spec.num_actions, successors, std::move(rewards), spec.gamma);
}

}  // namespace anderson_dp
