#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anderson_dp/garnet.hpp"
#include "anderson_dp/solvers.hpp"

namespace anderson_dp {

/// One solver configuration of the cohort: an algorithm and its memory.
struct RunKey {
    Algorithm algorithm;
    std::size_t m;

    auto operator<=>(const RunKey&) const = default;
};

struct ExperimentConfig {
    GarnetSpec garnet;  // seed is replaced by base_seed + i for instance i
    std::size_t num_mdps = 100;
    std::size_t num_iters = 250;
    std::vector<std::size_t> m_values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<Algorithm> algorithms = {Algorithm::VI, Algorithm::AndersonVI, Algorithm::RelativeVI,
                                         Algorithm::AndersonRelativeVI};
    std::uint64_t base_seed = 0;
    double lambda_rel = kDefaultLambdaRel;
    std::size_t anchor_state = 0;
    int threads = 0;  // 0: OpenMP default
    std::optional<std::filesystem::path> dump_dir;  // serialize every generated MDP here
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const ExperimentConfig& config);

/// The runs performed on every MDP: each unaccelerated algorithm for m = 0
/// and each accelerated one for every m >= 1, ordered by (algorithm, m).
std::vector<RunKey> planned_runs(const ExperimentConfig& config);

struct ExperimentRecord {
    std::uint64_t mdp_seed;
    Algorithm algorithm;
    std::size_t m;
    std::size_t iteration;
    double norm_error;
    double greedy_error;

    bool operator==(const ExperimentRecord&) const = default;
};

struct FailedRun {
    std::uint64_t mdp_seed;
    Algorithm algorithm;
    std::size_t m;
    std::size_t iteration;
    std::string message;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;  // sorted by (algorithm, m, mdp_seed, iteration)
    std::vector<FailedRun> failures;        // sorted by (algorithm, m, mdp_seed)
};

/// Strict weak order used for every record listing: (algorithm, m, mdp_seed, iteration).
bool record_order(const ExperimentRecord& a, const ExperimentRecord& b);

/**
 * Runs every planned solver on num_mdps Garnet instances, starting from v0 = 0.
 *
 * The optimal value v* of each instance comes from policy iteration and is
 * shared by all runs on that instance. Relative schemes are scored against
 * v* - v*(anchor) 1 for the normalized error; greedy errors always use v*.
 * A run that aborts (divergence, failed oracle, violated VI contraction) is
 * reported in `failures` and contributes no records. Instances are processed
 * in parallel; output order does not depend on scheduling.
 */
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class Metric { NormError, GreedyError };
std::string_view metric_name(Metric metric);

struct AggregateRow {
    Algorithm algorithm;
    std::size_t m;
    std::size_t iteration;
    Metric metric;
    double mean;
    double std;  // population standard deviation
    std::size_t count;
};

/// Mean and population std per (algorithm, m, iteration), summed in ascending
/// mdp_seed order. Rows are ordered by (algorithm, m, metric, iteration).
std::vector<AggregateRow> aggregate(std::vector<ExperimentRecord> records);

/// Looks up one aggregate; nullopt if absent.
std::optional<AggregateRow> find_aggregate(const std::vector<AggregateRow>& rows, Algorithm algorithm,
                                           std::size_t m, std::size_t iteration, Metric metric);

}  // namespace anderson_dp
