#include "anderson_dp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <fmt/core.h>
#include <omp.h>

#include "anderson_dp/mdp_io.hpp"

namespace anderson_dp {

void validate(const ExperimentConfig& config) {
    if (config.num_mdps == 0) throw std::invalid_argument("num_mdps must be at least 1");
    if (config.num_iters == 0) throw std::invalid_argument("num_iters must be at least 1");
    if (config.m_values.empty()) throw std::invalid_argument("m_values must not be empty");
    if (config.algorithms.empty()) throw std::invalid_argument("at least one algorithm is required");
    if (!(config.lambda_rel >= 0.0)) throw std::invalid_argument("lambda_rel must be nonnegative");
    if (config.anchor_state >= config.garnet.num_states) {
        throw std::invalid_argument("anchor state out of range");
    }
    if (config.garnet.branching < 1 || config.garnet.branching > config.garnet.num_states) {
        throw std::invalid_argument("branching must lie in [1, states]");
    }
    if (!(config.garnet.gamma > 0.0 && config.garnet.gamma < 1.0)) {
        throw std::invalid_argument("gamma must lie in (0, 1)");
    }
    if (planned_runs(config).empty()) {
        throw std::invalid_argument("no runs selected: unaccelerated algorithms need m = 0, "
                                    "accelerated ones need some m >= 1");
    }
}

std::vector<RunKey> planned_runs(const ExperimentConfig& config) {
    std::vector<RunKey> runs;
    for (const auto algorithm : config.algorithms) {
        for (const auto m : config.m_values) {
            if (is_accelerated(algorithm) == (m >= 1)) runs.push_back({algorithm, m});
        }
    }
    std::sort(runs.begin(), runs.end());
    runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
    return runs;
}

bool record_order(const ExperimentRecord& a, const ExperimentRecord& b) {
    return std::tie(a.algorithm, a.m, a.mdp_seed, a.iteration) <
           std::tie(b.algorithm, b.m, b.mdp_seed, b.iteration);
}

namespace {

// Greedy-policy errors memoized by policy: consecutive iterates usually share
// their greedy policy, and each miss costs a dense linear solve.
class GreedyErrorCache {
public:
    GreedyErrorCache(const Mdp& mdp, const ValueFunction& v_star) : mdp_(mdp), v_star_(v_star) {}

    double operator()(const ValueFunction& v) {
        auto actions = greedy_actions(mdp_, v);
        if (const auto it = cache_.find(actions); it != cache_.end()) return it->second;
        const auto value = exact_policy_value(mdp_, Policy::deterministic(actions, mdp_.num_actions()));
        const double error = normalized_error(v_star_, value);
        cache_.emplace(std::move(actions), error);
        return error;
    }

private:
    const Mdp& mdp_;
    const ValueFunction& v_star_;
    std::map<std::vector<std::size_t>, double> cache_;
};

// Plain VI must contract towards v* in sup norm at rate gamma.
std::optional<std::size_t> first_contraction_violation(const SolverTrace& trace, const ValueFunction& v_star,
                                                       double gamma) {
    const double slack = 1e-9 * (1.0 + v_star.cwiseAbs().maxCoeff());
    double previous = (trace.iterates.front() - v_star).cwiseAbs().maxCoeff();
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
        const double current = (trace.iterates[k] - v_star).cwiseAbs().maxCoeff();
        if (current > gamma * previous + slack) return k;
        previous = current;
    }
    return std::nullopt;
}

struct InstanceOutcome {
    std::vector<ExperimentRecord> records;
    std::vector<FailedRun> failures;
};

InstanceOutcome run_instance(const ExperimentConfig& config, const std::vector<RunKey>& runs,
                             std::uint64_t seed) {
    InstanceOutcome out;
    GarnetSpec spec = config.garnet;
    spec.seed = seed;

    std::optional<Mdp> mdp;
    std::optional<ValueFunction> v_star;
    try {
        mdp = generate_garnet(spec);
        if (config.dump_dir) save_mdp(*config.dump_dir / fmt::format("mdp_{}.txt", seed), *mdp);
        v_star = optimal_value_oracle(*mdp).value;
    } catch (const std::exception& e) {
        for (const auto& run : runs) out.failures.push_back({seed, run.algorithm, run.m, 0, e.what()});
        return out;
    }

    ValueFunction v_star_relative = *v_star;
    v_star_relative.array() -= (*v_star)[config.anchor_state];
    GreedyErrorCache greedy_error(*mdp, *v_star);
    const ValueFunction v0 = ValueFunction::Zero(mdp->num_states());
    const RelativeViConfig relative{config.anchor_state};

    for (const auto& run : runs) {
        std::vector<ExperimentRecord> records;
        try {
            const auto trace = run_solver(run.algorithm, *mdp, v0, run.m, config.num_iters,
                                          config.lambda_rel, relative);
            if (run.algorithm == Algorithm::VI) {
                if (const auto k = first_contraction_violation(trace, *v_star, mdp->gamma())) {
                    throw DivergenceError(*k, fmt::format("value iteration failed to contract at iteration {}", *k));
                }
            }
            const ValueFunction& target = is_relative(run.algorithm) ? v_star_relative : *v_star;
            records.reserve(trace.iterates.size());
            for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
                const auto& v = trace.iterates[k];
                records.push_back({seed, run.algorithm, run.m, k, normalized_error(target, v), greedy_error(v)});
            }
        } catch (const DivergenceError& e) {
            out.failures.push_back({seed, run.algorithm, run.m, e.iteration(), e.what()});
            continue;
        } catch (const std::exception& e) {
            out.failures.push_back({seed, run.algorithm, run.m, 0, e.what()});
            continue;
        }
        out.records.insert(out.records.end(), records.begin(), records.end());
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    const auto runs = planned_runs(config);
    if (config.dump_dir) std::filesystem::create_directories(*config.dump_dir);

    std::vector<InstanceOutcome> outcomes(config.num_mdps);
    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(config.num_mdps);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
        outcomes[i] = run_instance(config, runs, config.base_seed + static_cast<std::uint64_t>(i));
    }

    ExperimentResult result;
    for (auto& o : outcomes) {
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
        for (auto& f : o.failures) result.failures.push_back(std::move(f));
    }
    std::sort(result.records.begin(), result.records.end(), record_order);
    std::sort(result.failures.begin(), result.failures.end(), [](const FailedRun& a, const FailedRun& b) {
        return std::tie(a.algorithm, a.m, a.mdp_seed) < std::tie(b.algorithm, b.m, b.mdp_seed);
    });
    return result;
}

std::string_view metric_name(Metric metric) {
    return metric == Metric::NormError ? "norm_error" : "greedy_error";
}

std::vector<AggregateRow> aggregate(std::vector<ExperimentRecord> records) {
    std::sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        return std::tie(a.algorithm, a.m, a.iteration, a.mdp_seed) <
               std::tie(b.algorithm, b.m, b.iteration, b.mdp_seed);
    });

    std::vector<AggregateRow> norm_rows;
    std::vector<AggregateRow> greedy_rows;
    const auto summarize = [](auto first, auto last, auto field) {
        const auto n = static_cast<double>(std::distance(first, last));
        double sum = 0.0;
        for (auto it = first; it != last; ++it) sum += (*it).*field;
        const double mean = sum / n;
        double sq = 0.0;
        for (auto it = first; it != last; ++it) sq += ((*it).*field - mean) * ((*it).*field - mean);
        return std::pair{mean, std::sqrt(sq / n)};
    };

    for (auto first = records.begin(); first != records.end();) {
        auto last = std::find_if(first, records.end(), [&](const ExperimentRecord& r) {
            return r.algorithm != first->algorithm || r.m != first->m || r.iteration != first->iteration;
        });
        const auto n = static_cast<std::size_t>(std::distance(first, last));
        const auto [nm, ns] = summarize(first, last, &ExperimentRecord::norm_error);
        const auto [gm, gs] = summarize(first, last, &ExperimentRecord::greedy_error);
        norm_rows.push_back({first->algorithm, first->m, first->iteration, Metric::NormError, nm, ns, n});
        greedy_rows.push_back({first->algorithm, first->m, first->iteration, Metric::GreedyError, gm, gs, n});
        first = last;
    }

    std::vector<AggregateRow> rows;
    rows.reserve(norm_rows.size() + greedy_rows.size());
    rows.insert(rows.end(), norm_rows.begin(), norm_rows.end());
    rows.insert(rows.end(), greedy_rows.begin(), greedy_rows.end());
    std::stable_sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
        return std::tie(a.algorithm, a.m, a.metric, a.iteration) < std::tie(b.algorithm, b.m, b.metric, b.iteration);
    });
    return rows;
}

std::optional<AggregateRow> find_aggregate(const std::vector<AggregateRow>& rows, Algorithm algorithm,
                                           std::size_t m, std::size_t iteration, Metric metric) {
    for (const auto& r : rows) {
        if (r.algorithm == algorithm && r.m == m && r.iteration == iteration && r.metric == metric) return r;
    }
    return std::nullopt;
}

}  // namespace anderson_dp
