#include "uoro/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace uoro {

namespace {

const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double map(double v, double pix_lo, double pix_hi) const {
        double a = log ? std::log10(v) : v;
        double l = log ? std::log10(lo) : lo;
        double h = log ? std::log10(hi) : hi;
        if (h == l) h = l + 1.0;
        return pix_lo + (a - l) / (h - l) * (pix_hi - pix_lo);
    }

    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            const int e0 = int(std::floor(std::log10(lo)));
            const int e1 = int(std::ceil(std::log10(hi)));
            for (int e = e0; e <= e1; ++e) t.push_back(std::pow(10.0, e));
        } else {
            const double span = hi - lo;
            const double step = std::pow(10.0, std::floor(std::log10(span <= 0 ? 1 : span)));
            const double s = span / step > 5 ? step : step / 2;
            for (double v = std::ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s)
                t.push_back(v);
        }
        return t;
    }
};

}  // namespace

void write_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt,
                    std::ostream& os) {
    Axis xa, ya;
    xa.log = opt.log_x;
    ya.log = opt.log_y;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const PlotSeries& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (opt.log_x && x <= 0) continue;
            if (opt.log_y && y <= 0) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = opt.log_x ? 1 : 0;
        xmax = 1;
        ymin = opt.log_y ? 1 : 0;
        ymax = 1;
    }
    xa.lo = xmin;
    xa.hi = xmax > xmin ? xmax : xmin + 1;
    ya.lo = ymin;
    ya.hi = ymax > ymin ? ymax : ymin + 1;

    const double ml = 80, mr = 20, mt = 40, mb = 50;
    const double px0 = ml, px1 = opt.width - mr;
    const double py0 = opt.height - mb, py1 = mt;  // y grows upward

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
       << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << opt.title << "</text>\n";

    for (double t : xa.ticks()) {
        if (t < xa.lo || t > xa.hi) continue;
        const double px = xa.map(t, px0, px1);
        os << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(py0) << "\" x2=\"" << fmt(px)
           << "\" y2=\"" << fmt(py1) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(py0 + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << fmt(t) << "</text>\n";
    }
    for (double t : ya.ticks()) {
        if (t < ya.lo || t > ya.hi) continue;
        const double py = ya.map(t, py0, py1);
        os << "<line x1=\"" << fmt(px0) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(px1)
           << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << fmt(px0 - 6) << "\" y=\"" << fmt(py + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
           << "</text>\n";
    }
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (px1 - px0)
       << "\" height=\"" << (py0 - py1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << opt.height - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << opt.x_label << "</text>\n";
    os << "<text x=\"18\" y=\"" << (py0 + py1) / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       << "transform=\"rotate(-90 18 " << (py0 + py1) / 2 << ")\">" << opt.y_label
       << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const char* color = kColors[si % (sizeof kColors / sizeof kColors[0])];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.4\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if ((opt.log_x && x <= 0) || (opt.log_y && y <= 0)) continue;
            os << fmt(xa.map(x, px0, px1)) << ',' << fmt(ya.map(y, py0, py1)) << ' ';
        }
        os << "\"/>\n";
        const double ly = mt + 16 + 16 * double(si);
        os << "<line x1=\"" << px1 - 150 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
           << px1 - 130 << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << px1 - 124 << "\" y=\"" << fmt(ly)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace uoro
