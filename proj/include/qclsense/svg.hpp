// svg.hpp
// Minimal deterministic chart emitter: first CSV column is x, every other
// numeric column becomes a polyline. Non-finite cells split the line into
// segments, so divergent sweep entries show up as gaps.

#pragma once

#include "qclsense/io.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace qclsense {

namespace svg_detail {

inline const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Rounds a raw spacing to the nearest 1/2/5 decade multiple.
inline double nice_step(double raw) {
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    if (frac <= 1.5) return mag;
    if (frac <= 3.5) return 2.0 * mag;
    if (frac <= 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

inline std::vector<double> ticks(double lo, double hi, int target) {
    const double step = nice_step((hi - lo) / double(target));
    std::vector<double> out;
    double t = std::ceil(lo / step - 1e-9) * step;
    for (; t <= hi + 1e-9 * step; t += step) out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace svg_detail

inline std::string render_line_chart(const CsvTable& table, const std::string& title = "") {
    using namespace svg_detail;
    if (table.header.size() < 2) throw std::runtime_error("chart needs an x column and a series");
    const std::size_t n = table.rows.size();
    if (n < 1) throw std::runtime_error("chart needs at least one data row");

    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!try_parse_double(table.rows[i][0], xs[i]) || !std::isfinite(xs[i]))
            throw std::runtime_error("chart x column has a non-numeric cell at data row " +
                                     std::to_string(i + 1));
    }

    // Columns with any unparseable cell (for example a text flag) are skipped.
    std::vector<std::size_t> series_cols;
    std::vector<std::vector<double>> series;
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        std::vector<double> col(n);
        bool numeric = true;
        for (std::size_t i = 0; i < n && numeric; ++i)
            numeric = try_parse_double(table.rows[i][c], col[i]);
        if (numeric) {
            series_cols.push_back(c);
            series.push_back(std::move(col));
        }
    }
    if (series.empty()) throw std::runtime_error("chart found no numeric series column");

    double xmin = xs[0], xmax = xs[0];
    for (double v : xs) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    double ymin = 0.0, ymax = 0.0;
    bool have_y = false;
    for (const auto& col : series)
        for (double v : col) {
            if (!std::isfinite(v)) continue;
            if (!have_y) {
                ymin = ymax = v;
                have_y = true;
            } else {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    if (!have_y) throw std::runtime_error("chart series contain no finite values");
    if (xmax - xmin <= 0.0) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin <= 0.0) {
        ymin -= 0.5;
        ymax += 0.5;
    }

    const double width = 960, height = 600;
    const double ml = 72, mr = 24, mt = title.empty() ? 24 : 48, mb = 52;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << coord(width / 2)
            << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
            << xml_escape(title) << "</text>\n";

    for (double t : ticks(xmin, xmax, 8)) {
        const std::string x = coord(px(t));
        out << "<line x1=\"" << x << "\" y1=\"" << coord(mt) << "\" x2=\"" << x << "\" y2=\""
            << coord(mt + ph) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << coord(mt + ph + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << tick_label(t) << "</text>\n";
    }
    for (double t : ticks(ymin, ymax, 6)) {
        const std::string y = coord(py(t));
        out << "<line x1=\"" << coord(ml) << "\" y1=\"" << y << "\" x2=\"" << coord(ml + pw)
            << "\" y2=\"" << y << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << coord(ml - 8) << "\" y=\"" << coord(py(t) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << tick_label(t) << "</text>\n";
    }
    out << "<rect x=\"" << coord(ml) << "\" y=\"" << coord(mt) << "\" width=\"" << coord(pw)
        << "\" height=\"" << coord(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << coord(ml + pw / 2) << "\" y=\"" << coord(height - 10)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(table.header[0]) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 10];
        std::vector<std::string> run;
        auto flush = [&] {
            if (run.size() >= 2) {
                out << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.8\" points=\"";
                for (std::size_t k = 0; k < run.size(); ++k) out << (k ? " " : "") << run[k];
                out << "\"/>\n";
            } else if (run.size() == 1) {
                // an isolated finite point between gaps still gets a mark
                const std::size_t comma = run[0].find(',');
                out << "<circle cx=\"" << run[0].substr(0, comma) << "\" cy=\""
                    << run[0].substr(comma + 1) << "\" r=\"2.2\" fill=\"" << color << "\"/>\n";
            }
            run.clear();
        };
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isfinite(series[s][i]))
                run.push_back(coord(px(xs[i])) + "," + coord(py(series[s][i])));
            else
                flush();
        }
        flush();
    }

    const double legend_x = ml + pw - 170, legend_y = mt + 12;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double y = legend_y + 18.0 * double(s);
        out << "<line x1=\"" << coord(legend_x) << "\" y1=\"" << coord(y) << "\" x2=\""
            << coord(legend_x + 26) << "\" y2=\"" << coord(y) << "\" stroke=\""
            << kPalette[s % 10] << "\" stroke-width=\"2.5\"/>\n";
        out << "<text x=\"" << coord(legend_x + 34) << "\" y=\"" << coord(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(table.header[series_cols[s]]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace qclsense
