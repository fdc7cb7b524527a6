#include "livrank/composer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "livrank/error.hpp"
#include "livrank/kernels.hpp"

namespace livrank {

Raster::Raster(int w, int h, Rgb fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw DataError("raster dimensions must be positive");
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Rgb Raster::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Raster::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

void ComposeConfig::validate() const {
  if (gap_px < 0 || border_px < 0) throw ConfigError("gap and border must be non-negative");
  if (max_width_px < 2 * border_px + gap_px + 2)
    throw ConfigError("max width " + std::to_string(max_width_px) + " leaves no room for two images after borders (" +
                      std::to_string(2 * border_px) + ") and gap (" + std::to_string(gap_px) + ")");
  if (max_height_px < 2 * border_px + 1)
    throw ConfigError("max height " + std::to_string(max_height_px) + " leaves no room inside the " +
                      std::to_string(border_px) + "px border");
}

LayoutPlan plan_layout(Size a, Size b, const ComposeConfig& cfg) {
  if (a.width <= 0 || a.height <= 0 || b.width <= 0 || b.height <= 0)
    throw DataError("image dimensions must be positive");
  cfg.validate();

  const int avail_w = cfg.max_width_px - 2 * cfg.border_px - cfg.gap_px;
  const int avail_h = cfg.max_height_px - 2 * cfg.border_px;
  const double s = std::min({1.0, static_cast<double>(avail_w) / (a.width + b.width),
                             static_cast<double>(avail_h) / std::max(a.height, b.height)});

  // A small epsilon keeps exact products such as 0.3 * 4000 from flooring to 1199.
  auto scaled = [s](int v) { return std::max(1, static_cast<int>(std::floor(s * v + 1e-9))); };
  LayoutPlan plan;
  plan.scale_factor = s;
  plan.scaled_a = {scaled(a.width), scaled(a.height)};
  plan.scaled_b = {scaled(b.width), scaled(b.height)};
  // Clamping a sub-pixel width up to 1 can overshoot by a pixel; take it from the wider image.
  while (plan.scaled_a.width + plan.scaled_b.width > avail_w) {
    Size& wider = plan.scaled_a.width >= plan.scaled_b.width ? plan.scaled_a : plan.scaled_b;
    --wider.width;
  }

  const int band = std::max(plan.scaled_a.height, plan.scaled_b.height);
  plan.canvas = {2 * cfg.border_px + plan.scaled_a.width + cfg.gap_px + plan.scaled_b.width, 2 * cfg.border_px + band};
  plan.origin_a = {cfg.border_px, cfg.border_px + (band - plan.scaled_a.height) / 2};
  plan.origin_b = {cfg.border_px + plan.scaled_a.width + cfg.gap_px, cfg.border_px + (band - plan.scaled_b.height) / 2};
  return plan;
}

Raster resize_bilinear(const Raster& src, Size target) {
  if (src.width <= 0 || src.height <= 0) throw DataError("cannot resize a zero-area image");
  if (target == src.size()) return src;
  Raster out(target.width, target.height);
  kernels::parallel::resample_bilinear({src.width, src.height, src.pixels}, {out.width, out.height, out.pixels});
  return out;
}

namespace {

void blit(Raster& canvas, const Raster& img, Point at) {
  const std::size_t row_bytes = static_cast<std::size_t>(img.width) * 3;
  for (int y = 0; y < img.height; ++y) {
    const auto* src = img.pixels.data() + static_cast<std::size_t>(y) * row_bytes;
    auto* dst = canvas.pixels.data() + (static_cast<std::size_t>(at.y + y) * canvas.width + at.x) * 3;
    std::copy(src, src + row_bytes, dst);
  }
}

}  // namespace

Raster compose(const Raster& a, const Raster& b, const ComposeConfig& cfg) {
  if (a.width <= 0 || a.height <= 0 || b.width <= 0 || b.height <= 0)
    throw DataError("cannot compose a zero-area image");
  const LayoutPlan plan = plan_layout(a.size(), b.size(), cfg);
  Raster canvas(plan.canvas.width, plan.canvas.height, cfg.background);
  blit(canvas, resize_bilinear(a, plan.scaled_a), plan.origin_a);
  blit(canvas, resize_bilinear(b, plan.scaled_b), plan.origin_b);
  return canvas;
}

}  // namespace livrank
