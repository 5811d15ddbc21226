#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "anderson_dp/experiment.hpp"

namespace anderson_dp {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    // Optional shaded band, same length as x.
    std::vector<double> band_low;
    std::vector<double> band_high;
};

struct ChartOptions {
    std::string title;
    std::string x_label = "iteration";
    std::string y_label;
    bool log_y = false;
};

/// Values at or below zero on a log axis are drawn at this floor and noted under the chart.
inline constexpr double kLogFloor = 1e-300;

/// Standalone SVG line chart, one colored polyline per series plus a legend.
/// Output bytes depend only on the inputs.
std::string render_line_chart(const ChartOptions& options, const std::vector<PlotSeries>& series);

/**
 * Writes the convergence charts for whatever families are present:
 *
 *   vi_norm_error.svg            mean normalized error with +-std band (VI family)
 *   vi_norm_error_mean_log.svg   mean normalized error, log scale
 *   vi_norm_error_std_log.svg    std of normalized error, log scale
 *   vi_greedy_error.svg          greedy-policy error, first 10 iterations
 *   rvi_norm_error_mean_log.svg  relative family, mean normalized error, log scale
 *   rvi_greedy_error.svg         relative family, greedy-policy error, first 10 iterations
 *
 * Returns the paths written.
 */
std::vector<std::filesystem::path> emit_plots(const std::vector<AggregateRow>& rows,
                                              const std::filesystem::path& output_dir);

}  // namespace anderson_dp
