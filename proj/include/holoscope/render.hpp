#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "measures.hpp"
#include "parallel.hpp"

namespace holoscope {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  std::uint8_t* pixel(int col, int row) { return &rgb[3 * (static_cast<std::size_t>(row) * width + col)]; }
  const std::uint8_t* pixel(int col, int row) const { return &rgb[3 * (static_cast<std::size_t>(row) * width + col)]; }

  /// P6 encoding.
  std::string ppm() const {
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    return out;
  }
};

/// Pixel centre of (col, row); row 0 is the top edge (ymax).
inline Cx pixel_center(const Window& w, int width, int height, int col, int row) {
  return {w.xmin + (col + 0.5) * (w.xmax - w.xmin) / width, w.ymax - (row + 0.5) * (w.ymax - w.ymin) / height};
}

/// Escape-time picture of a polynomial: interior black, exterior coloured in
/// bands of log2 G.
inline Image render_escape_time(const RationalMap& f, const Window& w, int width, int height, int n_max = 500) {
  require_polynomial(f, "render_escape_time");
  const double R = auto_escape_radius(f);
  Image img{width, height, std::vector<std::uint8_t>(3 * static_cast<std::size_t>(width) * height, 0)};
  parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
    for (int col = 0; col < width; ++col) {
      const auto g = green_function(f, pixel_center(w, width, height, col, static_cast<int>(row)), n_max, R);
      std::uint8_t* px = img.pixel(col, static_cast<int>(row));
      if (!(g.value > 0.0)) continue;
      const int band = static_cast<int>(std::floor(-std::log2(g.value) * 2.0));
      const double t = 0.5 + 0.5 * std::cos(0.7 * band);
      px[0] = static_cast<std::uint8_t>(60 + 195 * t);
      px[1] = static_cast<std::uint8_t>(40 + 120 * t);
      px[2] = static_cast<std::uint8_t>(120 + 100 * (1.0 - t));
    }
  });
  return img;
}

/// Per-pixel sample counts of a measure on the window.
struct DensityGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint64_t> counts;  // row-major, top row first
};

inline DensityGrid bin_density(const EmpiricalMeasure& mu, const Window& w, int width, int height) {
  DensityGrid g{width, height, std::vector<std::uint64_t>(static_cast<std::size_t>(width) * height, 0)};
  for (const Cx& z : mu.points) {
    if (!w.contains(z)) continue;
    const int col = std::min(width - 1, static_cast<int>((z.real() - w.xmin) / (w.xmax - w.xmin) * width));
    const int row = std::min(height - 1, static_cast<int>((w.ymax - z.imag()) / (w.ymax - w.ymin) * height));
    ++g.counts[static_cast<std::size_t>(row) * width + col];
  }
  return g;
}

/// Grey levels log(1 + count) / log(1 + max count).
inline Image render_density(const DensityGrid& g) {
  Image img{g.width, g.height, std::vector<std::uint8_t>(3 * g.counts.size(), 0)};
  const std::uint64_t top = g.counts.empty() ? 0 : *std::max_element(g.counts.begin(), g.counts.end());
  if (top == 0) return img;
  const double norm = std::log1p(static_cast<double>(top));
  for (std::size_t i = 0; i < g.counts.size(); ++i) {
    const auto v = static_cast<std::uint8_t>(std::lround(255.0 * std::log1p(static_cast<double>(g.counts[i])) / norm));
    img.rgb[3 * i] = img.rgb[3 * i + 1] = img.rgb[3 * i + 2] = v;
  }
  return img;
}

}  // namespace holoscope
