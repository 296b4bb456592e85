#include "iuh/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace iuh {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

SvgPanel::SvgPanel(double x_px, double y_px, double w_px, double h_px,
                   double x_min, double x_max, double y_min, double y_max,
                   bool log_x)
    : x0_(x_px), y0_(y_px), w_(w_px), h_(h_px), xmin_(x_min), xmax_(x_max),
      ymin_(y_min), ymax_(y_max), log_x_(log_x) {
    if (log_x_) {
        xmin_ = std::log10(x_min);
        xmax_ = std::log10(x_max);
    }
    if (xmax_ == xmin_) {
        xmin_ -= 0.5;
        xmax_ += 0.5;
    }
    if (ymax_ == ymin_) {
        ymin_ -= 0.5;
        ymax_ += 0.5;
    }
}

double SvgPanel::px(double x) const {
    const double v = log_x_ ? std::log10(x) : x;
    return x0_ + (v - xmin_) / (xmax_ - xmin_) * w_;
}

double SvgPanel::py(double y) const {
    return y0_ + h_ - (y - ymin_) / (ymax_ - ymin_) * h_;
}

void SvgPanel::axes(std::ostringstream& out, const std::string& x_label,
                    const std::string& y_label, std::span<const double> x_ticks,
                    std::span<const double> y_ticks,
                    const std::string& title) const {
    out << "<rect x='" << fmt(x0_) << "' y='" << fmt(y0_) << "' width='" << fmt(w_)
        << "' height='" << fmt(h_)
        << "' fill='none' stroke='#444' stroke-width='1'/>\n";
    for (double t : x_ticks) {
        const double x = px(t);
        out << "<line x1='" << fmt(x) << "' y1='" << fmt(y0_ + h_) << "' x2='" << fmt(x)
            << "' y2='" << fmt(y0_ + h_ + 4) << "' stroke='#444'/>\n";
        out << "<text x='" << fmt(x) << "' y='" << fmt(y0_ + h_ + 16)
            << "' font-size='10' text-anchor='middle' fill='#333'>" << fmt_tick(t)
            << "</text>\n";
    }
    for (double t : y_ticks) {
        const double y = py(t);
        out << "<line x1='" << fmt(x0_ - 4) << "' y1='" << fmt(y) << "' x2='" << fmt(x0_)
            << "' y2='" << fmt(y) << "' stroke='#444'/>\n";
        out << "<text x='" << fmt(x0_ - 6) << "' y='" << fmt(y + 3)
            << "' font-size='10' text-anchor='end' fill='#333'>" << fmt_tick(t)
            << "</text>\n";
    }
    out << "<text x='" << fmt(x0_ + w_ / 2) << "' y='" << fmt(y0_ + h_ + 32)
        << "' font-size='11' text-anchor='middle' fill='#111'>" << x_label
        << "</text>\n";
    out << "<text x='" << fmt(x0_ - 40) << "' y='" << fmt(y0_ + h_ / 2)
        << "' font-size='11' text-anchor='middle' fill='#111' transform='rotate(-90 "
        << fmt(x0_ - 40) << " " << fmt(y0_ + h_ / 2) << ")'>" << y_label
        << "</text>\n";
    if (!title.empty()) {
        out << "<text x='" << fmt(x0_ + w_ / 2) << "' y='" << fmt(y0_ - 8)
            << "' font-size='12' text-anchor='middle' fill='#111'>" << title
            << "</text>\n";
    }
}

void SvgPanel::band(std::ostringstream& out, std::span<const double> x,
                    std::span<const double> y_low, std::span<const double> y_high,
                    const std::string& color, double opacity) const {
    out << "<polygon points='";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << fmt(px(x[i])) << "," << fmt(py(y_high[i])) << " ";
    }
    for (std::size_t i = x.size(); i-- > 0;) {
        out << fmt(px(x[i])) << "," << fmt(py(y_low[i])) << " ";
    }
    out << "' fill='" << color << "' fill-opacity='" << opacity << "' stroke='none'/>\n";
}

void SvgPanel::line(std::ostringstream& out, std::span<const double> x,
                    std::span<const double> y, const std::string& color,
                    bool diamond_markers) const {
    out << "<polyline points='";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << fmt(px(x[i])) << "," << fmt(py(y[i])) << " ";
    }
    out << "' fill='none' stroke='" << color << "' stroke-width='1.5'/>\n";
    if (diamond_markers) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double cx = px(x[i]);
            const double cy = py(y[i]);
            out << "<polygon points='" << fmt(cx) << "," << fmt(cy - 4) << " "
                << fmt(cx + 4) << "," << fmt(cy) << " " << fmt(cx) << "," << fmt(cy + 4)
                << " " << fmt(cx - 4) << "," << fmt(cy) << "' fill='" << color
                << "'/>\n";
        }
    }
}

void SvgPanel::scatter(std::ostringstream& out, std::span<const double> x,
                       std::span<const double> y, const std::string& color,
                       double radius) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << "<circle cx='" << fmt(px(x[i])) << "' cy='" << fmt(py(y[i])) << "' r='"
            << radius << "' fill='" << color << "' fill-opacity='0.7'/>\n";
    }
}

void SvgPanel::scatter_sized(std::ostringstream& out, std::span<const double> x,
                             std::span<const double> y,
                             std::span<const double> radii,
                             const std::string& color) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << "<circle cx='" << fmt(px(x[i])) << "' cy='" << fmt(py(y[i])) << "' r='"
            << fmt(radii[i]) << "' fill='none' stroke='" << color
            << "' stroke-width='1.2'/>\n";
    }
}

void SvgPanel::text(std::ostringstream& out, double data_x, double data_y,
                    const std::string& s, const std::string& color) const {
    out << "<text x='" << fmt(px(data_x)) << "' y='" << fmt(py(data_y))
        << "' font-size='10' fill='" << color << "'>" << s << "</text>\n";
}

std::string svg_document(double width, double height, const std::string& body,
                         const std::string& metadata_comment) {
    std::ostringstream out;
    out << "<?xml version='1.0' encoding='UTF-8'?>\n";
    out << "<!-- " << metadata_comment << " -->\n";
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "' font-family='sans-serif'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << body;
    out << "</svg>\n";
    return out.str();
}

}  // namespace iuh
