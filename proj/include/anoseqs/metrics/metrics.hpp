#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace anoseqs::metrics {

struct EpisodeRecord {
    double return_orig = 0.0;
    std::int64_t cost_count = 0;
    std::int64_t length = 0;
    bool success = false;
    bool failure = false;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample (n-1) standard deviation, 0 for a single value
};

struct MetricsSummary {
    std::size_t count = 0;
    MeanStd episode_return;
    MeanStd episode_cost;
    MeanStd episode_cost_rate;
    MeanStd episode_length;
};

/// Sum of the rewards of one episode.
double episodic_return(std::span<const double> rewards);
/// Cost signals per step within one episode.
double episodic_cost_rate(std::int64_t cost_count, std::int64_t length);
/// Cost signals per step over a whole training run.
double total_cost_rate(std::int64_t total_costs, std::int64_t total_steps);

MeanStd mean_std(std::span<const double> values);
MetricsSummary summarize(std::span<const EpisodeRecord> records);

/// "15.33 ± 3.41"
std::string format_mean_std(const MeanStd& m, int decimals = 2);

/// Tab-separated table with one "<label> Mean ± Std" column per summary:
///   Environment  Metric  TD3 Mean ± Std  AnoSeqs Mean ± Std
///   <env>        Episode Cost     ...
///                Episode Rewards  ...
std::string render_summary_table(const std::string& environment,
                                 const std::vector<std::pair<std::string, MetricsSummary>>& columns);

/// One evaluation point of a learning curve.
struct CurvePoint {
    std::int64_t step = 0;
    double episodic_return_mean = 0.0;
    double episodic_cost_rate_mean = 0.0;
    double total_cost_rate = 0.0;
};

inline constexpr const char* kCurveHeader = "step,episodic_return_mean,episodic_cost_rate_mean,total_cost_rate";

std::string curve_to_csv(std::span<const CurvePoint> points);
std::vector<CurvePoint> curve_from_csv(const std::string& text);
void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> points);
std::vector<CurvePoint> read_curve_csv(const std::filesystem::path& path);

/// Pointwise mean of curves that share the same step column.
std::vector<CurvePoint> average_curves(const std::vector<std::vector<CurvePoint>>& curves);

} // namespace anoseqs::metrics
