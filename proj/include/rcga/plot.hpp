#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rcga/errors.hpp"

namespace rcga {

// Minimal static SVG chart: one polyline with point markers over numeric
// x/y data, with linear axes and a handful of tick labels. Good enough for
// eyeballing scaling trends without pulling in a plotting stack.
class SvgChart {
  public:
    SvgChart(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string name, std::vector<double> xs, std::vector<double> ys) {
        if (xs.size() != ys.size()) throw invalid_parameter("SvgChart: x/y length mismatch");
        series_.push_back({std::move(name), std::move(xs), std::move(ys)});
    }

    void write(const std::string& path) const {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : series_)
            for (size_t i = 0; i < s.xs.size(); ++i) {
                xmin = std::min(xmin, s.xs[i]);
                xmax = std::max(xmax, s.xs[i]);
                ymin = std::min(ymin, s.ys[i]);
                ymax = std::max(ymax, s.ys[i]);
            }
        if (xmin > xmax) {
            xmin = 0;
            xmax = 1;
            ymin = 0;
            ymax = 1;
        }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + (ymin == 0 ? 1 : std::abs(ymin) * 0.1);
        // pad the y range so markers do not sit on the frame
        const double ypad = (ymax - ymin) * 0.08;
        ymin -= ypad;
        ymax += ypad;

        const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
        const auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
        const auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

        std::ofstream out(path);
        if (!out) throw invalid_parameter("SvgChart: cannot open " + path);
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
            << "' viewBox='0 0 " << W << " " << H << "'>\n";
        out << "<rect width='100%' height='100%' fill='white'/>\n";
        out << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title_
            << "</text>\n";
        // axes
        out << "<line x1='" << L << "' y1='" << H - B << "' x2='" << W - R << "' y2='" << H - B
            << "' stroke='black'/>\n";
        out << "<line x1='" << L << "' y1='" << T << "' x2='" << L << "' y2='" << H - B
            << "' stroke='black'/>\n";
        out << "<text x='" << (L + W - R) / 2 << "' y='" << H - 12
            << "' text-anchor='middle' font-size='12'>" << x_label_ << "</text>\n";
        out << "<text x='16' y='" << (T + H - B) / 2 << "' text-anchor='middle' font-size='12' "
            << "transform='rotate(-90 16 " << (T + H - B) / 2 << ")'>" << y_label_ << "</text>\n";
        for (int k = 0; k <= 4; ++k) {
            const double xv = xmin + (xmax - xmin) * k / 4.0;
            const double yv = ymin + (ymax - ymin) * k / 4.0;
            out << "<line x1='" << px(xv) << "' y1='" << H - B << "' x2='" << px(xv) << "' y2='"
                << H - B + 5 << "' stroke='black'/>\n";
            out << "<text x='" << px(xv) << "' y='" << H - B + 18
                << "' text-anchor='middle' font-size='10'>" << format(xv) << "</text>\n";
            out << "<line x1='" << L - 5 << "' y1='" << py(yv) << "' x2='" << L << "' y2='"
                << py(yv) << "' stroke='black'/>\n";
            out << "<text x='" << L - 8 << "' y='" << py(yv) + 3
                << "' text-anchor='end' font-size='10'>" << format(yv) << "</text>\n";
        }
        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
        for (size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            const char* color = colors[si % 4];
            out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
            for (size_t i = 0; i < s.xs.size(); ++i)
                out << px(s.xs[i]) << ',' << py(s.ys[i]) << ' ';
            out << "'/>\n";
            for (size_t i = 0; i < s.xs.size(); ++i)
                out << "<circle cx='" << px(s.xs[i]) << "' cy='" << py(s.ys[i])
                    << "' r='3.5' fill='" << color << "'/>\n";
            out << "<text x='" << W - R - 6 << "' y='" << T + 14 + 14 * static_cast<double>(si)
                << "' text-anchor='end' font-size='11' fill='" << color << "'>" << s.name
                << "</text>\n";
        }
        out << "</svg>\n";
    }

  private:
    struct Series {
        std::string name;
        std::vector<double> xs, ys;
    };

    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

} // namespace rcga
