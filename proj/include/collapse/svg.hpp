#pragma once

#include "collapse/dynamics.hpp"
#include "collapse/stats.hpp"
#include "collapse/types.hpp"

#include <string>

namespace collapse {

// Deterministic SVG renderings (no timestamps; a fixed generator-version
// comment is the only non-data line). Supported dimensions: N = 2 draws the
// trajectory on the positive quarter of the unit circle with the boundary
// points (1,0) and (0,1) marked; N = 3 draws a ternary plot of the
// trajectory in p = b^2 coordinates.
std::string trajectory_svg(const Trajectory& traj);

// P1_hat(x) against x with Wilson error bars and the y = x reference line.
std::string scan_svg(const ScanResult& scan);

bool svg_supported_dimension(Index n);

}  // namespace collapse
