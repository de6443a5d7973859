#include "gasdiff/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

namespace {

// Sampled viridis.
constexpr const char* kPalette[kHeatmapBins] = {"#440154", "#482878", "#3e4989", "#31688e", "#26828e",
                                                "#1f9e89", "#35b779", "#6ece58", "#b5de2b", "#fde725"};

}  // namespace

int heatmap_bin(double value) {
  if (!(value > 0.0)) return 0;
  return std::min(kHeatmapBins - 1, static_cast<int>(std::floor(value * kHeatmapBins)));
}

const char* heatmap_color(int bin) { return kPalette[std::clamp(bin, 0, kHeatmapBins - 1)]; }

void render_heatmap(const ScalarField& f, std::ostream& out, int cell_px) {
  const auto& g = f.grid();
  const int rows = g.dim() == 2 ? g.n() : 1;
  const int cols = g.n();
  fmt::print(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
             "viewBox=\"0 0 {0} {1}\">\n",
             cols * cell_px, rows * cell_px);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double v = g.dim() == 2 ? f.at(r, c) : f.at(c);
      fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", c * cell_px,
                 r * cell_px, cell_px, cell_px, heatmap_color(heatmap_bin(v)));
    }
  fmt::print(out, "</svg>\n");
}

void render_heatmap(const std::string& field_csv, const std::string& svg_path, int cell_px) {
  const auto field = read_field_csv(field_csv);
  std::ofstream out(svg_path);
  if (!out) throw InputError("cannot open " + svg_path + " for writing");
  render_heatmap(field.field, out, cell_px);
}

}  // namespace gasdiff
