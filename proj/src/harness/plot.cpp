#include "anoseqs/harness/plot.hpp"

#include "anoseqs/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace anoseqs::harness {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_line_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series) {
    if (series.empty()) throw Error("plot: no series");
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size()) throw Error("plot: series '" + s.label + "' is empty or ragged");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) throw Error("plot: non-finite value");
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                      num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
           "</text>\n";
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0, yv = ymin + (ymax - ymin) * i / 4.0;
        svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" + tick(xv) +
               "</text>\n";
        svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) +
               "</text>\n";
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
               num(py(yv)) + "\" stroke=\"#dddddd\"/>\n";
    }
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">step</text>\n";
    svg += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(kTop + ph / 2) + ")\">" + escape(y_label) + "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % std::size(kColors)];
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) svg += (i ? " " : "") + num(px(s.x[i])) + "," + num(py(s.y[i]));
        svg += "\"/>\n";
        const double ly = kTop + 14 + 18 * static_cast<double>(k);
        svg += "<line x1=\"" + num(kLeft + pw + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(kLeft + pw + 30) +
               "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(kLeft + pw + 35) + "\" y=\"" + num(ly) + "\">" + escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<std::filesystem::path> plot_curves(
    const std::vector<std::pair<std::string, std::vector<metrics::CurvePoint>>>& curves,
    const std::filesystem::path& out_dir) {
    if (curves.empty()) throw Error("plot: no curves");
    for (const auto& [label, c] : curves) {
        if (c.empty()) throw Error("plot: curve '" + label + "' is empty");
        if (c.size() != curves.front().second.size()) throw Error("plot: curves differ in length");
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i].step != curves.front().second[i].step) throw Error("plot: curves do not share the step column");
    }
    struct Panel {
        const char* file;
        const char* title;
        double metrics::CurvePoint::*field;
    };
    const Panel panels[] = {
        {"episodic_return.svg", "Episodic return", &metrics::CurvePoint::episodic_return_mean},
        {"episodic_cost_rate.svg", "Episodic cost rate", &metrics::CurvePoint::episodic_cost_rate_mean},
        {"total_cost_rate.svg", "Total cost rate", &metrics::CurvePoint::total_cost_rate},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& p : panels) {
        std::vector<Series> series;
        for (const auto& [label, c] : curves) {
            Series s{label, {}, {}};
            for (const auto& pt : c) {
                s.x.push_back(static_cast<double>(pt.step));
                s.y.push_back(pt.*(p.field));
            }
            series.push_back(std::move(s));
        }
        const auto path = out_dir / p.file;
        write_file(path, render_line_chart(p.title, p.title, series));
        written.push_back(path);
    }
    return written;
}

} // namespace anoseqs::harness
