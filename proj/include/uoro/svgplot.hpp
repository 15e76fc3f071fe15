#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uoro {

// Minimal line-chart renderer producing a standalone SVG image. Enough
// for loss-vs-step curves with optional log axes; not a plotting library.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "step";
    std::string y_label = "loss";
    bool log_x = false;
    bool log_y = false;
    int width = 860;
    int height = 560;
};

void write_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt,
                    std::ostream& os);

}  // namespace uoro
