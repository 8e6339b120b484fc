#pragma once

#include <filesystem>
#include <string>

#include "tabxai/lrp.hpp"

namespace tabxai {

/// Color for a value in [0, 1]: #0B3D91 at 0, white at 0.5, #C1272D at 1.
/// Values outside the range are clamped.
std::string ramp_color(double value);

struct HeatmapStyle {
  double cell_width = 28.0;
  double cell_height = 14.0;
  double tau = 0.5;  // marked on the legend
};

std::string heatmap_svg(const HeatmapMatrix& matrix, const HeatmapStyle& style = {});

/// Writes heatmap_svg(matrix) to `path`; throws Error on write failure.
void render_heatmap(const HeatmapMatrix& matrix, const std::filesystem::path& path, const HeatmapStyle& style = {});

}  // namespace tabxai
