#pragma once

#include "anoseqs/metrics/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace anoseqs::harness {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Deterministic SVG line chart; the axes span the data range.
std::string render_line_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series);

/// Writes episodic_return.svg, episodic_cost_rate.svg and total_cost_rate.svg,
/// one series per labelled curve. Curves must share the step column.
std::vector<std::filesystem::path> plot_curves(
    const std::vector<std::pair<std::string, std::vector<metrics::CurvePoint>>>& curves,
    const std::filesystem::path& out_dir);

} // namespace anoseqs::harness
