#include "collapse/svg.hpp"

#include "collapse/state_space.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace collapse {

namespace {

constexpr const char* kGeneratorComment = "<!-- collapse-lab svg generator v1 -->\n";
constexpr int kWidth = 440;
constexpr int kHeight = 440;
constexpr double kMargin = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string svg_open() {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
    s += std::to_string(kWidth);
    s += "\" height=\"";
    s += std::to_string(kHeight);
    s += "\" viewBox=\"0 0 " + std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    s += kGeneratorComment;
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return s;
}

std::string circle(double cx, double cy, double r, const std::string& fill) {
    return "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + fill + "\"/>\n";
}

std::string text(double x, double y, const std::string& content, const std::string& anchor) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"" + anchor + "\">" +
           content + "</text>\n";
}

// Unit square in data coordinates mapped to the drawing area, y up.
double map_x(double x) { return kMargin + x * (kWidth - 2 * kMargin); }
double map_y(double y) { return kHeight - kMargin - y * (kHeight - 2 * kMargin); }

std::string quarter_circle_trajectory(const Trajectory& traj) {
    std::string s = svg_open();
    // Quarter arc from (1,0) to (0,1).
    s += "<path d=\"M " + num(map_x(1)) + " " + num(map_y(0)) + " A " +
         num(kWidth - 2 * kMargin) + " " + num(kHeight - 2 * kMargin) + " 0 0 0 " +
         num(map_x(0)) + " " + num(map_y(1)) + "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    // Axes.
    s += "<line x1=\"" + num(map_x(0)) + "\" y1=\"" + num(map_y(0)) + "\" x2=\"" +
         num(map_x(1.02)) + "\" y2=\"" + num(map_y(0)) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + num(map_x(0)) + "\" y1=\"" + num(map_y(0)) + "\" x2=\"" +
         num(map_x(0)) + "\" y2=\"" + num(map_y(1.02)) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    s += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
    for (const BPoint& p : traj.points) {
        s += num(map_x(p[0])) + "," + num(map_y(p[1])) + " ";
    }
    s += "\"/>\n";

    // Boundary points and the initial point.
    s += circle(map_x(1), map_y(0), 4, "#2c3e50");
    s += circle(map_x(0), map_y(1), 4, "#2c3e50");
    s += text(map_x(1) + 8, map_y(0) + 4, "(1,0)", "start");
    s += text(map_x(0) + 8, map_y(1) + 4, "(0,1)", "start");
    if (!traj.points.empty()) {
        const BPoint& b0 = traj.points.front();
        s += circle(map_x(b0[0]), map_y(b0[1]), 4, "#27ae60");
        s += text(map_x(b0[0]) + 8, map_y(b0[1]) - 6, "b(0)", "start");
    }
    s += text(map_x(0.5), kHeight - 12, "b_0", "middle");
    s += text(14, map_y(0.5), "b_1", "middle");
    s += "</svg>\n";
    return s;
}

std::string ternary_trajectory(const Trajectory& traj) {
    // Barycentric map of p = b^2: corners p=(1,0,0), (0,1,0), (0,0,1).
    const double ax = 0.0, ay = 0.0;
    const double bx = 1.0, by = 0.0;
    const double cx = 0.5, cy = std::sqrt(3.0) / 2.0;
    auto tx = [&](const Vec& p) { return p[0] * ax + p[1] * bx + p[2] * cx; };
    auto ty = [&](const Vec& p) { return p[0] * ay + p[1] * by + p[2] * cy; };

    std::string s = svg_open();
    s += "<polygon points=\"" + num(map_x(ax)) + "," + num(map_y(ay)) + " " + num(map_x(bx)) +
         "," + num(map_y(by)) + " " + num(map_x(cx)) + "," + num(map_y(cy)) +
         "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";

    s += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
    for (const BPoint& b : traj.points) {
        const Vec p = bpoint_to_probabilities(b);
        s += num(map_x(tx(p))) + "," + num(map_y(ty(p))) + " ";
    }
    s += "\"/>\n";

    s += circle(map_x(ax), map_y(ay), 4, "#2c3e50");
    s += circle(map_x(bx), map_y(by), 4, "#2c3e50");
    s += circle(map_x(cx), map_y(cy), 4, "#2c3e50");
    s += text(map_x(ax) - 8, map_y(ay) + 16, "p_0", "middle");
    s += text(map_x(bx) + 8, map_y(by) + 16, "p_1", "middle");
    s += text(map_x(cx), map_y(cy) - 10, "p_2", "middle");
    if (!traj.points.empty()) {
        const Vec p0 = bpoint_to_probabilities(traj.points.front());
        s += circle(map_x(tx(p0)), map_y(ty(p0)), 4, "#27ae60");
    }
    s += "</svg>\n";
    return s;
}

}  // namespace

bool svg_supported_dimension(Index n) { return n == 2 || n == 3; }

std::string trajectory_svg(const Trajectory& traj) {
    if (traj.points.empty()) throw std::invalid_argument("trajectory_svg: empty trajectory");
    const Index n = traj.points.front().size();
    if (n == 2) return quarter_circle_trajectory(traj);
    if (n == 3) return ternary_trajectory(traj);
    throw std::invalid_argument("SVG supported for N in {2,3}");
}

std::string scan_svg(const ScanResult& scan) {
    std::string s = svg_open();
    // Frame and the reference line y = x.
    s += "<rect x=\"" + num(map_x(0)) + "\" y=\"" + num(map_y(1)) + "\" width=\"" +
         num(kWidth - 2 * kMargin) + "\" height=\"" + num(kHeight - 2 * kMargin) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + num(map_x(0)) + "\" y1=\"" + num(map_y(0)) + "\" x2=\"" +
         num(map_x(1)) + "\" y2=\"" + num(map_y(1)) +
         "\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";

    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
        const double x = scan.grid[i];
        const CollapseStats& st = scan.per_x[i];
        const double p = st.frequencies[0];
        s += "<line x1=\"" + num(map_x(x)) + "\" y1=\"" + num(map_y(st.ci_low[0])) +
             "\" x2=\"" + num(map_x(x)) + "\" y2=\"" + num(map_y(st.ci_high[0])) +
             "\" stroke=\"#c0392b\" stroke-width=\"1\"/>\n";
        s += circle(map_x(x), map_y(p), 3, "#c0392b");
    }
    s += text(map_x(0.5), kHeight - 12, "x = b_1^2(0)", "middle");
    s += text(16, map_y(0.5), "P_1", "middle");
    s += "</svg>\n";
    return s;
}

}  // namespace collapse
