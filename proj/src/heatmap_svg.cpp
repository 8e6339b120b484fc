#include "tabxai/heatmap_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tabxai/error.hpp"

namespace tabxai {

namespace {

struct Rgb {
  double r, g, b;
};

constexpr Rgb kLow{0x0B, 0x3D, 0x91};
constexpr Rgb kMid{0xFF, 0xFF, 0xFF};
constexpr Rgb kHigh{0xC1, 0x27, 0x2D};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string ramp_color(double value) {
  const double t = std::isfinite(value) ? std::clamp(value, 0.0, 1.0) : 0.5;
  const Rgb& a = t <= 0.5 ? kLow : kMid;
  const Rgb& b = t <= 0.5 ? kMid : kHigh;
  const double u = t <= 0.5 ? t / 0.5 : (t - 0.5) / 0.5;
  auto channel = [u](double x, double y) { return static_cast<int>(std::lround(x + (y - x) * u)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", channel(a.r, b.r), channel(a.g, b.g), channel(a.b, b.b));
  return buf;
}

std::string heatmap_svg(const HeatmapMatrix& matrix, const HeatmapStyle& style) {
  const auto n_rows = matrix.rows.rows();
  const auto n_cols = matrix.rows.cols();
  if (n_rows == 0 || n_cols == 0) throw Error("cli", "empty_heatmap", "cannot render an empty heatmap");
  const double cw = style.cell_width, ch = style.cell_height;
  const double left = 90.0, top = 150.0 + (matrix.title.empty() ? 0.0 : 20.0);
  const double grid_w = cw * static_cast<double>(n_cols);
  const double mean_gap = matrix.mean_row ? ch : 0.0;
  const double grid_h = ch * static_cast<double>(n_rows) + (matrix.mean_row ? mean_gap + ch : 0.0);
  const double legend_y = top + grid_h + 24.0;
  const double legend_w = std::max(200.0, std::min(grid_w, 400.0));
  const double width = left + std::max(grid_w, legend_w) + 20.0;
  const double height = legend_y + 50.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#FFFFFF\"/>\n";
  if (!matrix.title.empty()) {
    svg << "<text x=\"" << num(left) << "\" y=\"16\" font-size=\"13\">" << escape(matrix.title) << "</text>\n";
  }
  for (Eigen::Index c = 0; c < n_cols; ++c) {
    const std::string name = static_cast<std::size_t>(c) < matrix.feature_names.size()
                                 ? matrix.feature_names[static_cast<std::size_t>(c)]
                                 : "f" + std::to_string(c);
    const double x = left + cw * (static_cast<double>(c) + 0.5);
    svg << "<text class=\"col-label\" transform=\"translate(" << num(x) << "," << num(top - 4.0)
        << ") rotate(-60)\">" << escape(name) << "</text>\n";
  }
  auto row = [&](const Eigen::VectorXd& values, double y, const std::string& label, const std::string& cls) {
    svg << "<text class=\"row-label\" x=\"" << num(left - 4.0) << "\" y=\"" << num(y + ch * 0.75)
        << "\" text-anchor=\"end\">" << escape(label) << "</text>\n";
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      svg << "<rect class=\"" << cls << "\" x=\"" << num(left + cw * static_cast<double>(c)) << "\" y=\"" << num(y)
          << "\" width=\"" << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << ramp_color(values(c))
          << "\"/>\n";
    }
  };
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const std::string label = static_cast<std::size_t>(r) < matrix.record_ids.size()
                                  ? "#" + std::to_string(matrix.record_ids[static_cast<std::size_t>(r)])
                                  : "#" + std::to_string(r);
    row(matrix.rows.row(r).transpose(), top + ch * static_cast<double>(r), label, "cell");
  }
  if (matrix.mean_row) {
    row(*matrix.mean_row, top + ch * static_cast<double>(n_rows) + mean_gap, "mean", "mean-cell");
  }

  svg << "<defs><linearGradient id=\"ramp\" x1=\"0\" x2=\"1\" y1=\"0\" y2=\"0\">"
      << "<stop offset=\"0\" stop-color=\"" << ramp_color(0.0) << "\"/>"
      << "<stop offset=\"0.5\" stop-color=\"" << ramp_color(0.5) << "\"/>"
      << "<stop offset=\"1\" stop-color=\"" << ramp_color(1.0) << "\"/>"
      << "</linearGradient></defs>\n";
  svg << "<rect class=\"legend\" x=\"" << num(left) << "\" y=\"" << num(legend_y) << "\" width=\"" << num(legend_w)
      << "\" height=\"12\" fill=\"url(#ramp)\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
  svg << "<text x=\"" << num(left) << "\" y=\"" << num(legend_y + 26.0) << "\">0</text>\n";
  svg << "<text x=\"" << num(left + legend_w) << "\" y=\"" << num(legend_y + 26.0)
      << "\" text-anchor=\"end\">1</text>\n";
  const double tau_x = left + legend_w * std::clamp(style.tau, 0.0, 1.0);
  svg << "<line class=\"tau\" x1=\"" << num(tau_x) << "\" x2=\"" << num(tau_x) << "\" y1=\"" << num(legend_y - 4.0)
      << "\" y2=\"" << num(legend_y + 16.0) << "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
  char tau_text[32];
  std::snprintf(tau_text, sizeof tau_text, "tau=%g", style.tau);
  svg << "<text x=\"" << num(tau_x) << "\" y=\"" << num(legend_y + 38.0) << "\" text-anchor=\"middle\">" << tau_text
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void render_heatmap(const HeatmapMatrix& matrix, const std::filesystem::path& path, const HeatmapStyle& style) {
  const std::string text = heatmap_svg(matrix, style);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cli", "write_error", "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("cli", "write_error", "failed writing " + path.string());
}

}  // namespace tabxai
