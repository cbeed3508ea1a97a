#include "anoseqs/metrics/metrics.hpp"

#include "anoseqs/common.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace anoseqs::metrics {

double episodic_return(std::span<const double> rewards) {
    double total = 0.0;
    for (double r : rewards) total += r;
    return total;
}

double episodic_cost_rate(std::int64_t cost_count, std::int64_t length) {
    if (length < 1) throw Error("episodic_cost_rate: episode length must be at least 1");
    return static_cast<double>(cost_count) / static_cast<double>(length);
}

double total_cost_rate(std::int64_t total_costs, std::int64_t total_steps) {
    if (total_steps < 1) throw Error("total_cost_rate: step count must be at least 1");
    return static_cast<double>(total_costs) / static_cast<double>(total_steps);
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) throw Error("mean_std: no values");
    MeanStd out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

MetricsSummary summarize(std::span<const EpisodeRecord> records) {
    if (records.empty()) throw Error("summarize: at least one episode record is required");
    std::vector<double> ret, cost, rate, len;
    for (const auto& r : records) {
        ret.push_back(r.return_orig);
        cost.push_back(static_cast<double>(r.cost_count));
        rate.push_back(episodic_cost_rate(r.cost_count, r.length));
        len.push_back(static_cast<double>(r.length));
    }
    return MetricsSummary{records.size(), mean_std(ret), mean_std(cost), mean_std(rate), mean_std(len)};
}

std::string format_mean_std(const MeanStd& m, int decimals) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*f ± %.*f", decimals, m.mean, decimals, m.std);
    return buf;
}

std::string render_summary_table(const std::string& environment,
                                 const std::vector<std::pair<std::string, MetricsSummary>>& columns) {
    std::string out = "Environment\tMetric";
    for (const auto& [label, _] : columns) out += "\t" + label + " Mean ± Std";
    out += "\n" + environment + "\tEpisode Cost";
    for (const auto& [_, s] : columns) out += "\t" + format_mean_std(s.episode_cost);
    out += "\n\tEpisode Rewards";
    for (const auto& [_, s] : columns) out += "\t" + format_mean_std(s.episode_return);
    out += "\n";
    return out;
}

std::string curve_to_csv(std::span<const CurvePoint> points) {
    std::string out = std::string(kCurveHeader) + "\n";
    for (const auto& p : points) {
        out += std::to_string(p.step) + "," + format_double(p.episodic_return_mean) + "," +
               format_double(p.episodic_cost_rate_mean) + "," + format_double(p.total_cost_rate) + "\n";
    }
    return out;
}

std::vector<CurvePoint> curve_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCurveHeader) throw Error("metrics CSV: unexpected header");
    std::vector<CurvePoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CurvePoint p;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4) throw Error("metrics CSV: expected 4 columns in '" + line + "'");
        p.step = std::stoll(cells[0]);
        p.episodic_return_mean = std::stod(cells[1]);
        p.episodic_cost_rate_mean = std::stod(cells[2]);
        p.total_cost_rate = std::stod(cells[3]);
        points.push_back(p);
    }
    return points;
}

void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> points) {
    write_file(path, curve_to_csv(points));
}

std::vector<CurvePoint> read_curve_csv(const std::filesystem::path& path) {
    return curve_from_csv(read_file(path));
}

std::vector<CurvePoint> average_curves(const std::vector<std::vector<CurvePoint>>& curves) {
    if (curves.empty()) throw Error("average_curves: no curves");
    const std::size_t n = curves.front().size();
    std::vector<CurvePoint> out(n);
    for (const auto& c : curves) {
        if (c.size() != n) throw Error("average_curves: curves differ in length");
        for (std::size_t i = 0; i < n; ++i) {
            if (c[i].step != curves.front()[i].step) throw Error("average_curves: step columns differ");
            out[i].step = c[i].step;
            out[i].episodic_return_mean += c[i].episodic_return_mean;
            out[i].episodic_cost_rate_mean += c[i].episodic_cost_rate_mean;
            out[i].total_cost_rate += c[i].total_cost_rate;
        }
    }
    const double k = static_cast<double>(curves.size());
    for (auto& p : out) {
        p.episodic_return_mean /= k;
        p.episodic_cost_rate_mean /= k;
        p.total_cost_rate /= k;
    }
    return out;
}

} // namespace anoseqs::metrics
