#include "anderson_dp/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/core.h>

#include "anderson_dp/report.hpp"

namespace anderson_dp {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 130.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 70.0;

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo;
    double hi;
    bool log;

    double transform(double v) const { return log ? std::log10(v) : v; }
    double fraction(double v) const {
        const double a = transform(lo);
        const double b = transform(hi);
        return b > a ? (transform(v) - a) / (b - a) : 0.5;
    }
};

std::string tick_label(double v, bool log) {
    if (log) return fmt::format("1e{}", static_cast<int>(std::lround(std::log10(v))));
    return fmt::format("{:.4g}", v);
}

}  // namespace

std::string render_line_chart(const ChartOptions& options, const std::vector<PlotSeries>& series) {
    bool floored = false;
    const auto clamp = [&](double v) {
        if (options.log_y && !(v > kLogFloor)) {
            floored = true;
            return kLogFloor;
        }
        return v;
    };

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            for (double v : {s.y[i], s.band_low.empty() ? s.y[i] : s.band_low[i],
                             s.band_high.empty() ? s.y[i] : s.band_high[i]}) {
                v = clamp(v);
                y_lo = std::min(y_lo, v);
                y_hi = std::max(y_hi, v);
            }
        }
    }
    if (!(x_lo <= x_hi)) x_lo = 0.0, x_hi = 1.0;
    if (!(y_lo <= y_hi)) y_lo = options.log_y ? 1e-1 : 0.0, y_hi = 1.0;
    if (options.log_y) {
        y_lo = std::pow(10.0, std::floor(std::log10(y_lo)));
        y_hi = std::pow(10.0, std::ceil(std::log10(y_hi)));
        if (y_hi <= y_lo) y_hi = y_lo * 10.0;
    } else if (y_hi == y_lo) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }

    const Axis xa{x_lo, x_hi, false};
    const Axis ya{y_lo, y_hi, options.log_y};
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + xa.fraction(x) * pw; };
    const auto py = [&](double y) { return kTop + (1.0 - ya.fraction(clamp(y))) * ph; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
        "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       kLeft + pw / 2, escape(options.title));
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
                       kLeft, kTop, pw, ph);

    // Ticks.
    std::vector<double> y_ticks;
    if (options.log_y) {
        const int d_lo = static_cast<int>(std::lround(std::log10(y_lo)));
        const int d_hi = static_cast<int>(std::lround(std::log10(y_hi)));
        const int step = std::max(1, (d_hi - d_lo + 7) / 8);
        for (int d = d_lo; d <= d_hi; d += step) y_ticks.push_back(std::pow(10.0, d));
    } else {
        for (int i = 0; i <= 5; ++i) y_ticks.push_back(y_lo + (y_hi - y_lo) * i / 5.0);
    }
    for (double t : y_ticks) {
        const double y = kTop + (1.0 - ya.fraction(t)) * ph;
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.2f}\" x2=\"{2:.1f}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n",
                           kLeft, y, kLeft + pw);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, y + 4,
                           tick_label(t, options.log_y));
    }
    for (int i = 0; i <= 5; ++i) {
        const double t = x_lo + (x_hi - x_lo) * i / 5.0;
        const double x = px(t);
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.1f}\" x2=\"{0:.2f}\" y2=\"{2:.1f}\" stroke=\"#dddddd\"/>\n",
                           x, kTop, kTop + ph);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x, kTop + ph + 16,
                           tick_label(t, false));
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                       kTop + ph + 36, escape(options.x_label));
    svg += fmt::format("<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n",
                       kTop + ph / 2, escape(options.y_label));

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kPalette.size()];
        if (!s.band_low.empty() && !s.band_high.empty() && !s.x.empty()) {
            std::string points;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.band_high[i]));
            }
            for (std::size_t i = s.x.size(); i-- > 0;) {
                points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.band_low[i]));
            }
            points.pop_back();
            svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
                               points, color);
        }
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            points += fmt::format("{}{:.2f},{:.2f}", i == 0 ? "" : " ", px(s.x[i]), py(s.y[i]));
        }
        svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", points,
                           color);
        const double ly = kTop + 10 + 16.0 * static_cast<double>(k);
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                           kLeft + pw + 12, ly, kLeft + pw + 32, color);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kLeft + pw + 38, ly + 4, escape(s.label));
    }

    if (floored) {
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"9\" fill=\"#555555\">* values &lt;= 0 drawn at 1e-300</text>\n",
                           kLeft, kHeight - 8);
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

// Series for one family and metric, one per m, iterations [0, max_iteration].
std::vector<PlotSeries> collect_series(const std::vector<AggregateRow>& rows, bool relative, Metric metric,
                                       std::size_t max_iteration, bool with_band, bool use_std) {
    std::map<std::size_t, PlotSeries> by_m;
    for (const auto& r : rows) {
        if (is_relative(r.algorithm) != relative || r.metric != metric || r.iteration > max_iteration) continue;
        auto& s = by_m[r.m];
        s.label = fmt::format("m={}", r.m);
        s.x.push_back(static_cast<double>(r.iteration));
        s.y.push_back(use_std ? r.std : r.mean);
        if (with_band) {
            s.band_low.push_back(r.mean - r.std);
            s.band_high.push_back(r.mean + r.std);
        }
    }
    std::vector<PlotSeries> out;
    for (auto& [m, s] : by_m) out.push_back(std::move(s));
    return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::vector<AggregateRow>& rows,
                                              const std::filesystem::path& output_dir) {
    constexpr std::size_t kAll = std::numeric_limits<std::size_t>::max();
    constexpr std::size_t kGreedyWindow = 10;
    struct Chart {
        const char* file;
        bool relative;
        Metric metric;
        std::size_t max_iteration;
        bool band;
        bool use_std;
        ChartOptions options;
    };
    const std::vector<Chart> charts = {
        {"vi_norm_error.svg", false, Metric::NormError, kAll, true, false,
         {"Value iteration: normalized error (mean +- std)", "iteration", "normalized error", false}},
        {"vi_norm_error_mean_log.svg", false, Metric::NormError, kAll, false, false,
         {"Value iteration: normalized error (mean)", "iteration", "normalized error", true}},
        {"vi_norm_error_std_log.svg", false, Metric::NormError, kAll, false, true,
         {"Value iteration: normalized error (std)", "iteration", "std of normalized error", true}},
        {"vi_greedy_error.svg", false, Metric::GreedyError, kGreedyWindow, false, false,
         {"Value iteration: greedy policy error (mean)", "iteration", "greedy policy error", false}},
        {"rvi_norm_error_mean_log.svg", true, Metric::NormError, kAll, false, false,
         {"Relative value iteration: normalized error (mean)", "iteration", "normalized error", true}},
        {"rvi_greedy_error.svg", true, Metric::GreedyError, kGreedyWindow, false, false,
         {"Relative value iteration: greedy policy error (mean)", "iteration", "greedy policy error", false}},
    };

    std::filesystem::create_directories(output_dir);
    std::vector<std::filesystem::path> written;
    for (const auto& c : charts) {
        const auto series = collect_series(rows, c.relative, c.metric, c.max_iteration, c.band, c.use_std);
        if (series.empty()) continue;
        const auto path = output_dir / c.file;
        write_text_file(path, render_line_chart(c.options, series));
        written.push_back(path);
    }
    return written;
}

}  // namespace anderson_dp
