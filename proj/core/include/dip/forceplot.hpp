#pragma once

#include <string>

#include "dip/report.hpp"

namespace dip {

// Deterministic color table for the forceplot. The convention names colors
// (gray, green, purple); the hex values are pinned here for diff-ability.
inline constexpr const char* kStandaloneGray = "#9e9e9e";
inline constexpr const char* kInteractionGreen = "#2e7d32";
inline constexpr const char* kDependencePurple = "#6a1b9a";
inline constexpr const char* kCrossPredPurple = "#7e57c2";   // slim sub-bar
inline constexpr const char* kCovariancePurple = "#b39ddb";  // slim sub-bar

// Static SVG, 1000x600 viewbox: per entry, stacked signed bars (standalone
// gray, interaction green, dependencies purple; bar direction encodes the
// sign of the contribution) with a horizontal line at the entry's total, plus
// a slim secondary group splitting dependencies into cross-predictability and
// covariance. Output is deterministic for a given report.
std::string forceplot_svg(const Report& report);

void render_forceplot(const Report& report, const std::string& out_path);

}  // namespace dip
