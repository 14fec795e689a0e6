#pragma once

#include <string>
#include <vector>

namespace rogd::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    bool log_x = false;
    int width = 860;
    int height = 520;
};

// Write a self-contained SVG line chart: one polyline per series, axes with
// tick labels, and a legend. No external renderer involved.
void emit_plot(const std::vector<Series>& series, const std::string& path,
               const PlotOptions& options = {});

std::string render_plot(const std::vector<Series>& series, const PlotOptions& options = {});

}  // namespace rogd::svg
