#include "rogd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rogd/errors.hpp"

namespace rogd::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
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

// Round tick spacing to a 1/2/5 decade multiple.
double nice_step(double range, int target_ticks) {
    if (range <= 0.0) return 1.0;
    const double raw = range / std::max(target_ticks, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    double nice = 10.0;
    if (frac <= 1.0) {
        nice = 1.0;
    } else if (frac <= 2.0) {
        nice = 2.0;
    } else if (frac <= 5.0) {
        nice = 5.0;
    }
    return nice * mag;
}

}  // namespace

std::string render_plot(const std::vector<Series>& series, const PlotOptions& options) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series");
    for (const Series& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size()) {
            throw std::invalid_argument("emit_plot: series '" + s.name + "' is empty or ragged");
        }
    }

    const double margin_l = 70.0;
    const double margin_r = 20.0;
    const double margin_t = options.title.empty() ? 20.0 : 40.0;
    const double margin_b = 55.0;
    const double plot_w = options.width - margin_l - margin_r;
    const double plot_h = options.height - margin_t - margin_b;

    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i];
            if (options.log_x) {
                if (xv <= 0.0) continue;
                xv = std::log10(xv);
            }
            x_min = std::min(x_min, xv);
            x_max = std::max(x_max, xv);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (!std::isfinite(x_min) || !std::isfinite(y_min)) {
        throw std::invalid_argument("emit_plot: no drawable points");
    }
    if (x_max == x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max == y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const auto sx = [&](double x) {
        const double v = options.log_x ? std::log10(x) : x;
        return margin_l + (v - x_min) / (x_max - x_min) * plot_w;
    };
    const auto sy = [&](double y) {
        return margin_t + (y_max - y) / (y_max - y_min) * plot_h;
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << " "
        << options.height << "\">\n";
    out << "<rect width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        out << "<text x=\"" << options.width / 2.0
            << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
            << escape(options.title) << "</text>\n";
    }

    // Axes.
    out << "<g stroke=\"#333333\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t + plot_h << "\" x2=\""
        << margin_l + plot_w << "\" y2=\"" << margin_t + plot_h << "\"/>\n";
    out << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t << "\" x2=\"" << margin_l
        << "\" y2=\"" << margin_t + plot_h << "\"/>\n";
    out << "</g>\n";

    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    if (options.log_x) {
        const int d0 = static_cast<int>(std::ceil(x_min - 1e-9));
        const int d1 = static_cast<int>(std::floor(x_max + 1e-9));
        for (int d = d0; d <= d1; ++d) {
            const double px = margin_l + (d - x_min) / (x_max - x_min) * plot_w;
            out << "<line x1=\"" << fmt(px) << "\" y1=\"" << margin_t + plot_h << "\" x2=\""
                << fmt(px) << "\" y2=\"" << margin_t + plot_h + 5 << "\" stroke=\"#333333\"/>\n";
            out << "<text x=\"" << fmt(px) << "\" y=\"" << margin_t + plot_h + 18
                << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
        }
    } else {
        const double step = nice_step(x_max - x_min, 8);
        for (double v = std::ceil(x_min / step) * step; v <= x_max + 1e-9 * step; v += step) {
            const double px = margin_l + (v - x_min) / (x_max - x_min) * plot_w;
            out << "<line x1=\"" << fmt(px) << "\" y1=\"" << margin_t + plot_h << "\" x2=\""
                << fmt(px) << "\" y2=\"" << margin_t + plot_h + 5 << "\" stroke=\"#333333\"/>\n";
            out << "<text x=\"" << fmt(px) << "\" y=\"" << margin_t + plot_h + 18
                << "\" text-anchor=\"middle\">" << fmt(v) << "</text>\n";
        }
    }
    const double ystep = nice_step(y_max - y_min, 6);
    for (double v = std::ceil(y_min / ystep) * ystep; v <= y_max + 1e-9 * ystep; v += ystep) {
        const double py = sy(v);
        out << "<line x1=\"" << margin_l - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << margin_l
            << "\" y2=\"" << fmt(py) << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << margin_l - 8 << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    out << "<text x=\"" << margin_l + plot_w / 2.0 << "\" y=\"" << options.height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(options.x_label)
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << margin_t + plot_h / 2.0
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << margin_t + plot_h / 2.0 << ")\">" << escape(options.y_label) << "</text>\n";
    out << "</g>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (options.log_x && s.x[i] <= 0.0) continue;
            if (!first) out << " ";
            out << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i]));
            first = false;
        }
        out << "\"/>\n";
    }

    // Legend, top-right of the plot area.
    const double lx = margin_l + plot_w - 180.0;
    double ly = margin_t + 12.0;
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<line x1=\"" << lx << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << lx + 22
            << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << lx + 28 << "\" y=\"" << fmt(ly) << "\">" << escape(series[k].name)
            << "</text>\n";
        ly += 18.0;
    }
    out << "</g>\n";
    out << "</svg>\n";
    return out.str();
}

void emit_plot(const std::vector<Series>& series, const std::string& path,
               const PlotOptions& options) {
    std::ofstream out(path);
    if (!out) throw ConfigError("emit_plot: cannot open " + path);
    out << render_plot(series, options);
}

}  // namespace rogd::svg
