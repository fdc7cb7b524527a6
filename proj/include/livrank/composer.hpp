#pragma once

#include <cstdint>
#include <vector>

namespace livrank {

struct Size {
  int width = 0;
  int height = 0;
  friend bool operator==(const Size&, const Size&) = default;
};

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Rgb {
  std::uint8_t r = 255;
  std::uint8_t g = 255;
  std::uint8_t b = 255;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Raster() = default;
  Raster(int w, int h, Rgb fill = {});

  Size size() const noexcept { return {width, height}; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  friend bool operator==(const Raster&, const Raster&) = default;
};

struct ComposeConfig {
  int gap_px = 500;
  int border_px = 80;
  int max_width_px = 3060;
  int max_height_px = 1440;
  Rgb background{255, 255, 255};

  /// Throws ConfigError when borders plus gap leave no room for content.
  void validate() const;
};

struct LayoutPlan {
  Size scaled_a;
  Size scaled_b;
  Size canvas;
  Point origin_a;
  Point origin_b;
  double scale_factor = 1.0;
};

/// Places two images side by side under one shared scale factor s <= 1,
/// the largest that keeps the canvas within both caps. Images are
/// vertically centred on the content band.
LayoutPlan plan_layout(Size a, Size b, const ComposeConfig& cfg = {});

/// Renders the plan: background canvas with both images bilinearly
/// resampled into place.
Raster compose(const Raster& a, const Raster& b, const ComposeConfig& cfg = {});

/// Bilinear resize (OpenMP kernel).
Raster resize_bilinear(const Raster& src, Size target);

}  // namespace livrank
