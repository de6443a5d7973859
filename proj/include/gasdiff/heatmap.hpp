#pragma once

#include <ostream>
#include <string>

#include "gasdiff/core.hpp"

namespace gasdiff {

/// Number of discrete colours in the heatmap palette.
inline constexpr int kHeatmapBins = 10;

/// Palette bin for a value, linear over [0, 1] and clamped.
int heatmap_bin(double value);
const char* heatmap_color(int bin);

/// N x N grid of coloured rects, row j1 drawn top to bottom. d=1 fields
/// render as one row.
void render_heatmap(const ScalarField& f, std::ostream& out, int cell_px = 8);
void render_heatmap(const std::string& field_csv, const std::string& svg_path, int cell_px = 8);

}  // namespace gasdiff
