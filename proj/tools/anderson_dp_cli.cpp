// anderson-dp: run the Garnet convergence study for value iteration,
// relative value iteration and their Anderson-accelerated variants.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "anderson_dp/experiment.hpp"
#include "anderson_dp/report.hpp"
#include "anderson_dp/svg_plot.hpp"

namespace {

constexpr int kExitRunFailures = 1;
constexpr int kExitConfigError = 2;

// Accepts "5" or an inclusive range "0..9".
std::vector<std::size_t> parse_m_values(const std::vector<std::string>& args) {
    std::vector<std::size_t> values;
    for (const auto& arg : args) {
        const auto dots = arg.find("..");
        try {
            std::size_t used = 0;
            if (dots == std::string::npos) {
                values.push_back(std::stoul(arg, &used));
                if (used != arg.size()) throw std::invalid_argument(arg);
                continue;
            }
            const auto lo_text = arg.substr(0, dots);
            const auto hi_text = arg.substr(dots + 2);
            const auto lo = std::stoul(lo_text, &used);
            if (used != lo_text.size()) throw std::invalid_argument(arg);
            const auto hi = std::stoul(hi_text, &used);
            if (used != hi_text.size() || hi < lo) throw std::invalid_argument(arg);
            for (auto m = lo; m <= hi; ++m) values.push_back(m);
        } catch (const std::logic_error&) {
            throw std::invalid_argument(fmt::format("--m: '{}' is not an integer or range a..b", arg));
        }
    }
    return values;
}

int env_threads() {
    const char* text = std::getenv("ANDERSON_DP_THREADS");
    if (text == nullptr || *text == '\0') return 0;
    try {
        const int n = std::stoi(text);
        if (n < 1) throw std::invalid_argument(text);
        return n;
    } catch (const std::logic_error&) {
        throw std::invalid_argument(fmt::format("ANDERSON_DP_THREADS must be a positive integer, got '{}'", text));
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace anderson_dp;

    CLI::App app{"Anderson-accelerated value iteration on random Garnet MDPs"};
    ExperimentConfig config;
    std::vector<std::string> m_args = {"0..9"};
    std::vector<std::string> algo_args = {"vi", "avi", "rvi", "arvi"};
    std::string out_dir = "results";
    bool dump_mdps = false;
    bool no_plots = false;

    app.add_option("--states", config.garnet.num_states, "Number of states")->capture_default_str();
    app.add_option("--actions", config.garnet.num_actions, "Number of actions")->capture_default_str();
    app.add_option("--branching", config.garnet.branching, "Successors per state-action pair")
        ->capture_default_str();
    app.add_option("--gamma", config.garnet.gamma, "Discount factor")->capture_default_str();
    app.add_option("--num-mdps", config.num_mdps, "Number of random MDPs")->capture_default_str();
    app.add_option("--iters", config.num_iters, "Iterations per run")->capture_default_str();
    app.add_option("--m", m_args, "Anderson memory, repeatable or a range a..b (0 = unaccelerated)")
        ->capture_default_str();
    app.add_option("--algo", algo_args, "Algorithms: vi, avi, rvi, arvi (repeatable)")
        ->check(CLI::IsMember({"vi", "avi", "rvi", "arvi"}))
        ->capture_default_str();
    app.add_option("--base-seed", config.base_seed, "Seed of MDP 0; MDP i uses base-seed + i")
        ->capture_default_str();
    app.add_option("--lambda-rel", config.lambda_rel, "Relative Tikhonov regularization of the mixing solve")
        ->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--dump-mdps", dump_mdps, "Write every generated MDP to OUT/mdps/");
    app.add_flag("--no-plots", no_plots, "Skip SVG charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    ExperimentResult result;
    std::filesystem::path out(out_dir);
    try {
        config.m_values = parse_m_values(m_args);
        config.algorithms.clear();
        for (const auto& name : algo_args) config.algorithms.push_back(*parse_algorithm(name));
        config.threads = env_threads();
        if (dump_mdps) config.dump_dir = out / "mdps";
        validate(config);
        std::filesystem::create_directories(out);
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        result = run_experiment(config);
        const auto rows = aggregate(result.records);
        write_text_file(out / "records.csv", records_csv(result.records));
        write_text_file(out / "aggregates.csv", aggregates_csv(rows));
        write_text_file(out / "failures.csv", failures_csv(result.failures));
        if (!no_plots) emit_plots(rows, out);

        fmt::print("{} records, {} failed runs, output in {}\n", result.records.size(), result.failures.size(),
                   out.string());
        fmt::print("mean normalized error at iteration {}:\n", config.num_iters);
        for (const auto& run : planned_runs(config)) {
            if (const auto r = find_aggregate(rows, run.algorithm, run.m, config.num_iters, Metric::NormError)) {
                fmt::print("  {:<5} m={}  {:.6e}  (std {:.3e})\n", algorithm_name(run.algorithm), run.m, r->mean,
                           r->std);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRunFailures;
    }
    for (const auto& f : result.failures) {
        std::cerr << fmt::format("failed run: seed {} {} m={} at iteration {}: {}\n", f.mdp_seed,
                                 algorithm_name(f.algorithm), f.m, f.iteration, f.message);
    }
    return result.failures.empty() ? 0 : kExitRunFailures;
}
