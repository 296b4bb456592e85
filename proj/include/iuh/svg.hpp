#ifndef IUH_SVG_HPP
#define IUH_SVG_HPP

#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace iuh {

/// Minimal SVG plot writer: enough for shaded bands, marker lines and
/// scatter panels. One panel owns a data-to-pixel mapping.
class SvgPanel {
public:
    SvgPanel(double x_px, double y_px, double w_px, double h_px,
             double x_min, double x_max, double y_min, double y_max,
             bool log_x = false);

    double px(double x) const;
    double py(double y) const;

    void axes(std::ostringstream& out, const std::string& x_label,
              const std::string& y_label, std::span<const double> x_ticks,
              std::span<const double> y_ticks, const std::string& title) const;
    void band(std::ostringstream& out, std::span<const double> x,
              std::span<const double> y_low, std::span<const double> y_high,
              const std::string& color, double opacity) const;
    void line(std::ostringstream& out, std::span<const double> x,
              std::span<const double> y, const std::string& color,
              bool diamond_markers = false) const;
    void scatter(std::ostringstream& out, std::span<const double> x,
                 std::span<const double> y, const std::string& color,
                 double radius = 3.0) const;
    void scatter_sized(std::ostringstream& out, std::span<const double> x,
                       std::span<const double> y,
                       std::span<const double> radii,
                       const std::string& color) const;
    void text(std::ostringstream& out, double data_x, double data_y,
              const std::string& s, const std::string& color = "#333") const;

private:
    double x0_, y0_, w_, h_;
    double xmin_, xmax_, ymin_, ymax_;
    bool log_x_;
};

std::string svg_document(double width, double height, const std::string& body,
                         const std::string& metadata_comment);

}  // namespace iuh

#endif
