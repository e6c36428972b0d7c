#include "hitl/svg.hpp"

#include <algorithm>
#include <cmath>

#include "hitl/io.hpp"

namespace hitl::svg {

namespace {

std::string num(double v) { return format_double(v); }

std::string rgb(int r, int g, int b) {
    return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," + std::to_string(b) + ")";
}

}  // namespace

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::rect(double x, double y, double w, double h, const std::string& fill,
                  const std::string& stroke, double stroke_width) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"";
    if (stroke != "none")
        body_ += " stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) + "\"";
    body_ += "/>\n";
}

void Canvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Canvas::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                      double width) {
    if (pts.empty()) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
             "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) body_ += ' ';
        body_ += num(pts[i].first) + "," + num(pts[i].second);
    }
    body_ += "\"/>\n";
}

void Canvas::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" +
             fill + "\"/>\n";
}

void Canvas::text(double x, double y, const std::string& s, double size,
                  const std::string& anchor) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

std::string Canvas::str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
           "width=\"" +
           num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
           num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ +
           "</svg>\n";
}

std::string colormap(double v) {
    v = std::clamp(v, 0.0, 1.0);
    // dark blue -> teal -> green -> yellow
    static const int stops[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    const double x = v * 4.0;
    const int i = std::min(3, static_cast<int>(x));
    const double f = x - i;
    auto mix = [&](int c) {
        return static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
    };
    return rgb(mix(0), mix(1), mix(2));
}

std::vector<double> nice_ticks(double lo, double hi, std::size_t max_ticks) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / static_cast<double>(max_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> ticks;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 1e-9 * span; t += step) ticks.push_back(std::abs(t) < 1e-12 ? 0.0 : t);
    return ticks;
}

namespace {

constexpr double kWidth = 560.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 24.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 52.0;

struct Frame {
    double x0 = kLeft, y0 = kTop;
    double w = kWidth - kLeft - kRight;
    double h = kHeight - kTop - kBottom;
    double x_min, x_max, y_min, y_max;

    double px(double x) const { return x0 + (x - x_min) / (x_max - x_min) * w; }
    double py(double y) const { return y0 + h - (y - y_min) / (y_max - y_min) * h; }
};

void draw_axes(Canvas& c, const Frame& f, const std::string& title, const std::string& x_label,
               const std::string& y_label) {
    c.rect(f.x0, f.y0, f.w, f.h, "none", "#333333", 1.0);
    for (double t : nice_ticks(f.x_min, f.x_max)) {
        const double x = f.px(t);
        c.line(x, f.y0 + f.h, x, f.y0 + f.h + 5, "#333333", 1.0);
        c.text(x, f.y0 + f.h + 18, format_double(t), 11, "middle");
    }
    for (double t : nice_ticks(f.y_min, f.y_max)) {
        const double y = f.py(t);
        c.line(f.x0 - 5, y, f.x0, y, "#333333", 1.0);
        c.text(f.x0 - 8, y + 4, format_double(t), 11, "end");
    }
    c.text(f.x0 + f.w / 2, kHeight - 14, x_label, 13, "middle");
    c.text(16, f.y0 + f.h / 2, y_label, 13, "middle");
    c.text(f.x0 + f.w / 2, 22, title, 14, "middle");
}

}  // namespace

std::string series_plot(const std::vector<double>& values, const SeriesPlotSpec& spec) {
    Canvas c(kWidth, kHeight);
    Frame f;
    f.x_min = 0.0;
    f.x_max = values.empty() ? 1.0 : static_cast<double>(values.size() - 1);
    if (f.x_max <= f.x_min) f.x_max = f.x_min + 1.0;
    f.y_min = spec.y_min;
    f.y_max = spec.y_max;

    draw_axes(c, f, spec.title, spec.x_label, spec.y_label);

    std::vector<std::pair<double, double>> pts;
    pts.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        pts.emplace_back(f.px(static_cast<double>(i)),
                         f.py(std::clamp(values[i], f.y_min, f.y_max)));
    c.polyline(pts, spec.color, 1.2);
    return c.str();
}

std::string heatmap_plot(const std::vector<double>& values, std::size_t nx, std::size_t ny,
                         double x_min, double x_max, double y_min, double y_max,
                         const std::vector<std::pair<double, double>>& trajectory,
                         const HeatmapPlotSpec& spec) {
    Canvas c(kWidth, kHeight);
    Frame f;
    // extend by half a cell so node-centered cells tile the frame
    const double dx = (x_max - x_min) / static_cast<double>(nx - 1);
    const double dy = (y_max - y_min) / static_cast<double>(ny - 1);
    f.x_min = x_min - dx / 2;
    f.x_max = x_max + dx / 2;
    f.y_min = y_min - dy / 2;
    f.y_max = y_max + dy / 2;

    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double v = values[ix * ny + iy];
            const double cx = x_min + static_cast<double>(ix) * dx;
            const double cy = y_min + static_cast<double>(iy) * dy;
            const double px = f.px(cx - dx / 2);
            const double py = f.py(cy + dy / 2);
            c.rect(px, py, f.px(cx + dx / 2) - px, f.py(cy - dy / 2) - py, colormap(v));
        }
    }
    if (spec.contour_level > 0.0) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t iy = 0; iy < ny; ++iy) {
                if (values[ix * ny + iy] < spec.contour_level) continue;
                const double cx = x_min + static_cast<double>(ix) * dx;
                const double cy = y_min + static_cast<double>(iy) * dy;
                const double px = f.px(cx - dx / 2);
                const double py = f.py(cy + dy / 2);
                c.rect(px, py, f.px(cx + dx / 2) - px, f.py(cy - dy / 2) - py, "none", "white",
                       1.2);
            }
        }
    }
    if (!trajectory.empty()) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(trajectory.size());
        for (const auto& [x, y] : trajectory) pts.emplace_back(f.px(x), f.py(y));
        c.polyline(pts, "black", 1.0);
        c.circle(pts.front().first, pts.front().second, 3.5, "white");
        c.circle(pts.back().first, pts.back().second, 3.5, "red");
    }
    draw_axes(c, f, spec.title, spec.x_label, spec.y_label);
    return c.str();
}

}  // namespace hitl::svg
