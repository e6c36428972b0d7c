#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hitl::svg {

// Minimal deterministic SVG writer; coordinates are emitted with shortest
// round-trip formatting so files are byte-stable across runs.
class Canvas {
public:
    Canvas(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none", double stroke_width = 0.0);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill);
    void text(double x, double y, const std::string& s, double size = 12.0,
              const std::string& anchor = "start");

    std::string str() const;

private:
    double width_;
    double height_;
    std::string body_;
};

// Five-stop dark-blue-to-yellow colormap over [0, 1].
std::string colormap(double v);

// Tick positions covering [lo, hi] at a round step, at most `max_ticks`.
std::vector<double> nice_ticks(double lo, double hi, std::size_t max_ticks = 6);

struct SeriesPlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double y_min = 0.0;
    double y_max = 1.0;
    std::string color = "#1f6fb4";
};

// Polyline plot of one series against its index.
std::string series_plot(const std::vector<double>& values, const SeriesPlotSpec& spec);

struct HeatmapPlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double contour_level = 0.0;  // outline cells at or above this value when > 0
};

// Cell heatmap over a regular grid (values row-major over x, then y) with an
// optional level-set outline and an overlaid trajectory in data coordinates.
std::string heatmap_plot(const std::vector<double>& values, std::size_t nx, std::size_t ny,
                         double x_min, double x_max, double y_min, double y_max,
                         const std::vector<std::pair<double, double>>& trajectory,
                         const HeatmapPlotSpec& spec);

}  // namespace hitl::svg
