#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anderson_dp/garnet.hpp"
#include "anderson_dp/solvers.hpp"
#include "test_support.hpp"

using namespace anderson_dp;
using namespace anderson_dp::testing;

namespace {

GarnetSpec garnet(std::size_t states, std::size_t actions, std::size_t branching, double gamma,
                  std::uint64_t seed) {
    GarnetSpec spec;
    spec.num_states = states;
    spec.num_actions = actions;
    spec.branching = branching;
    spec.gamma = gamma;
    spec.seed = seed;
    return spec;
}

Mdp zero_reward_mdp(std::size_t states, double gamma) {
    std::mt19937_64 rng(1);
    const auto base = random_mdp(rng, states, 2, 2, gamma);
    std::vector<std::vector<Transition>> succ;
    for (std::size_t s = 0; s < states; ++s)
        for (std::size_t a = 0; a < 2; ++a) {
            const auto span = base.successors(s, a);
            succ.emplace_back(span.begin(), span.end());
        }
    return Mdp(states, 2, succ, std::vector<double>(states * 2, 0.0), gamma);
}

Vector shifted(const Vector& v, std::size_t anchor) { return v.array() - v[anchor]; }

}  // namespace

TEST_CASE("algorithm names round-trip") {
    for (auto a : {Algorithm::VI, Algorithm::AndersonVI, Algorithm::RelativeVI, Algorithm::AndersonRelativeVI}) {
        CHECK(parse_algorithm(algorithm_name(a)) == a);
    }
    CHECK_FALSE(parse_algorithm("pi"));
}

TEST_CASE("value_iteration") {
    SUBCASE("starting at the optimum stays there") {
        const auto mdp = generate_garnet(garnet(40, 3, 3, 0.95, 1));
        const auto v_star = optimal_value_oracle(mdp).value;
        const auto trace = value_iteration(mdp, v_star, 30);
        CHECK(trace.iterates.size() == 31);
        for (const auto& v : trace.iterates) CHECK(max_abs_diff(v, v_star) <= 1e-9);
    }

    SUBCASE("zero rewards decay geometrically") {
        const auto mdp = zero_reward_mdp(10, 0.8);
        const auto trace = value_iteration(mdp, Vector::Ones(10), 40);
        for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
            CHECK(std::abs(trace.iterates[k].cwiseAbs().maxCoeff() - std::pow(0.8, k)) <= 1e-12);
        }
    }

    SUBCASE("contraction bound towards the oracle") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto mdp = generate_garnet(garnet(30, 4, 3, 0.9, seed));
            const auto v_star = optimal_value_oracle(mdp).value;
            const auto trace = value_iteration(mdp, Vector::Zero(30), 100);
            const double e0 = max_abs_diff(trace.iterates[0], v_star);
            for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
                CHECK(max_abs_diff(trace.iterates[k], v_star) <= std::pow(0.9, k) * e0 + 1e-9);
                if (k > 0) {
                    CHECK(max_abs_diff(trace.iterates[k], v_star) <=
                          0.9 * max_abs_diff(trace.iterates[k - 1], v_star) + 1e-9);
                }
            }
            for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
                CHECK(max_abs_diff(trace.iterates[k + 1], bellman_opt(mdp, trace.iterates[k])) <= 1e-12);
            }
        }
    }

    CHECK_THROWS_AS(value_iteration(two_state_chain(), Vector::Zero(3), 5), std::invalid_argument);
}

TEST_CASE("anderson_vi") {
    SUBCASE("first accelerated step unrolled") {
        const auto mdp = generate_garnet(garnet(25, 3, 2, 0.9, 4));
        const Vector v0 = Vector::Zero(25);
        const auto trace = anderson_vi(mdp, v0, 1, 2);
        const Vector v1 = bellman_opt(mdp, v0);
        CHECK(trace.iterates[1] == v1);
        AndersonWindow w(2);
        w.push(v0, v1);
        w.push(v1, bellman_opt(mdp, v1));
        const auto sol = solve_alpha(w.residual_matrix());
        CHECK(trace.iterates[2] == anderson_combine(w, sol.alpha));
        REQUIRE(trace.alpha_history.size() == 1);
        CHECK(trace.alpha_history[0].alpha == sol.alpha);
    }

    SUBCASE("starting at the optimum stays there") {
        const auto mdp = generate_garnet(garnet(40, 4, 3, 0.99, 2));
        const auto v_star = optimal_value_oracle(mdp).value;
        const auto trace = anderson_vi(mdp, v_star, 5, 30);
        for (const auto& v : trace.iterates) CHECK(max_abs_diff(v, v_star) <= 1e-8);
    }

    SUBCASE("memory 0 reproduces value iteration bit for bit") {
        const auto mdp = generate_garnet(garnet(50, 4, 3, 0.99, 8));
        const auto a = anderson_vi(mdp, Vector::Zero(50), 0, 60);
        const auto b = value_iteration(mdp, Vector::Zero(50), 60);
        CHECK(a.iterates == b.iterates);
    }

    SUBCASE("beats value iteration on affine (single-action) problems") {
        int wins = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto mdp = generate_garnet(garnet(100, 1, 3, 0.99, seed));
            const auto v_star = optimal_value_oracle(mdp).value;
            const auto vi = value_iteration(mdp, Vector::Zero(100), 50);
            const auto avi = anderson_vi(mdp, Vector::Zero(100), 3, 50);
            if (normalized_error(v_star, avi.iterates[50]) <= normalized_error(v_star, vi.iterates[50])) ++wins;
        }
        CHECK(wins >= 95);
    }
}

TEST_CASE("relative_value_iteration") {
    SUBCASE("zero rewards give zero iterates") {
        const auto mdp = zero_reward_mdp(8, 0.9);
        const auto trace = relative_value_iteration(mdp, Vector::Ones(8), {}, 10);
        for (std::size_t k = 1; k < trace.iterates.size(); ++k) CHECK(trace.iterates[k] == Vector::Zero(8));
    }

    SUBCASE("anchored at zero, converges to the shifted optimum") {
        const auto mdp = generate_garnet(garnet(100, 4, 3, 0.99, 3));
        const auto v_star = optimal_value_oracle(mdp).value;
        const RelativeViConfig config{7};
        const auto trace = relative_value_iteration(mdp, Vector::Zero(100), config, 5000);
        for (std::size_t k = 1; k < trace.iterates.size(); ++k) CHECK(trace.iterates[k][7] == 0.0);
        CHECK(max_abs_diff(trace.iterates.back(), shifted(v_star, 7)) <= 1e-6);
    }

    CHECK_THROWS_AS(relative_value_iteration(two_state_chain(), Vector::Zero(2), {2}, 5), std::invalid_argument);
}

TEST_CASE("anderson_relative_vi") {
    SUBCASE("zero rewards give zero iterates") {
        const auto mdp = zero_reward_mdp(8, 0.9);
        const auto trace = anderson_relative_vi(mdp, Vector::Zero(8), {}, 3, 10);
        for (const auto& v : trace.iterates) CHECK(v == Vector::Zero(8));
    }

    SUBCASE("anchor stays exactly zero") {
        const auto mdp = generate_garnet(garnet(60, 4, 3, 0.99, 5));
        const auto trace = anderson_relative_vi(mdp, Vector::Zero(60), {0}, 5, 100);
        for (std::size_t k = 1; k < trace.iterates.size(); ++k) CHECK(trace.iterates[k][0] == 0.0);
    }

    SUBCASE("fixed point is kept with a window holding every iterate") {
        const auto mdp = generate_garnet(garnet(50, 4, 3, 0.99, 6));
        const Vector target = shifted(optimal_value_oracle(mdp).value, 0);
        const auto trace = anderson_relative_vi(mdp, target, {0}, 50, 40);
        for (const auto& v : trace.iterates) CHECK(max_abs_diff(v, target) <= 1e-8);
    }

    SUBCASE("early acceleration over relative VI on G(100,4,3)") {
        double rvi_total = 0.0;
        double arvi_total = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto mdp = generate_garnet(garnet(100, 4, 3, 0.99, seed));
            const Vector target = shifted(optimal_value_oracle(mdp).value, 0);
            rvi_total += normalized_error(target, relative_value_iteration(mdp, Vector::Zero(100), {0}, 20).iterates[20]);
            arvi_total += normalized_error(target, anderson_relative_vi(mdp, Vector::Zero(100), {0}, 5, 20).iterates[20]);
        }
        MESSAGE("mean normalized error at iteration 20: rvi " << rvi_total / 100 << ", arvi(m=5) " << arvi_total / 100);
        CHECK(arvi_total <= rvi_total);
    }
}

TEST_CASE("normalized_error") {
    const Vector v_star{{2.0, 2.0}};
    CHECK(normalized_error(v_star, v_star) == 0.0);
    CHECK(normalized_error(v_star, Vector::Zero(2)) == 1.0);
    CHECK(normalized_error(v_star, Vector{{1.0, 3.0}}) == 0.5);
    CHECK_THROWS_AS(normalized_error(Vector::Zero(2), v_star), std::domain_error);
    CHECK_THROWS_AS(normalized_error(v_star, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("greedy_policy_error") {
    std::mt19937_64 rng(41);

    SUBCASE("zero at the optimum, nonnegative elsewhere") {
        const auto mdp = generate_garnet(garnet(50, 4, 3, 0.99, 9));
        const auto v_star = optimal_value_oracle(mdp).value;
        CHECK(greedy_policy_error(mdp, v_star, v_star) <= 1e-12);
        for (int i = 0; i < 20; ++i) CHECK(greedy_policy_error(mdp, v_star, random_vector(rng, 50)) >= 0.0);
    }

    SUBCASE("single-action MDPs have no policy error") {
        const auto mdp = generate_garnet(garnet(20, 1, 2, 0.9, 10));
        const auto v_star = optimal_value_oracle(mdp).value;
        CHECK(greedy_policy_error(mdp, v_star, random_vector(rng, 20)) <= 1e-12);
    }

    SUBCASE("invariant under constant shifts") {
        std::uniform_real_distribution<double> shift(-50.0, 50.0);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto mdp = generate_garnet(garnet(30, 4, 3, 0.95, seed));
            const auto v_star = optimal_value_oracle(mdp).value;
            for (int i = 0; i < 10; ++i) {
                const Vector v = random_vector(rng, 30);
                const Vector moved = v.array() + shift(rng);
                CHECK(greedy_policy_error(mdp, v_star, moved) == greedy_policy_error(mdp, v_star, v));
            }
        }
    }
}

TEST_CASE("greedy policies of VI and relative VI coincide") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto mdp = generate_garnet(garnet(50, 4, 3, 0.99, seed));
        const auto vi = value_iteration(mdp, Vector::Zero(50), 100);
        const auto rvi = relative_value_iteration(mdp, Vector::Zero(50), {}, 100);
        for (std::size_t k = 0; k <= 100; ++k) {
            CHECK(greedy_actions(mdp, vi.iterates[k]) == greedy_actions(mdp, rvi.iterates[k]));
        }
    }
}

TEST_CASE("run_solver dispatches") {
    const auto mdp = generate_garnet(garnet(20, 2, 2, 0.9, 11));
    const Vector v0 = Vector::Zero(20);
    CHECK(run_solver(Algorithm::VI, mdp, v0, 7, 5).iterates == value_iteration(mdp, v0, 5).iterates);
    CHECK(run_solver(Algorithm::AndersonVI, mdp, v0, 2, 5).iterates == anderson_vi(mdp, v0, 2, 5).iterates);
    CHECK(run_solver(Algorithm::RelativeVI, mdp, v0, 0, 5).iterates ==
          relative_value_iteration(mdp, v0, {}, 5).iterates);
    const auto arvi = run_solver(Algorithm::AndersonRelativeVI, mdp, v0, 2, 5);
    CHECK(arvi.algorithm == Algorithm::AndersonRelativeVI);
    CHECK(arvi.m == 2);
}
