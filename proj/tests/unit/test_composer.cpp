#include <doctest.h>

#include <cstdlib>
#include <random>

#include "fixtures.hpp"
#include "livrank/composer.hpp"
#include "livrank/error.hpp"
#include "livrank/image_io.hpp"
#include "oracles.hpp"

using namespace livrank;

namespace {

Raster gradient(int w, int h, int phase) {
  Raster r(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      r.set(x, y, {static_cast<std::uint8_t>((x * 255) / std::max(1, w - 1)),
                   static_cast<std::uint8_t>((y * 255) / std::max(1, h - 1)),
                   static_cast<std::uint8_t>((phase + x + y) % 256)});
  return r;
}

bool outside(const LayoutPlan& p, int x, int y) {
  auto in = [&](Point o, Size s) { return x >= o.x && x < o.x + s.width && y >= o.y && y < o.y + s.height; };
  return !in(p.origin_a, p.scaled_a) && !in(p.origin_b, p.scaled_b);
}

}  // namespace

TEST_CASE("layout without scaling") {
  const LayoutPlan p = plan_layout({100, 100}, {100, 100});
  CHECK(p.scale_factor == 1.0);
  CHECK(p.canvas == Size{860, 260});
  CHECK(p.origin_a == Point{80, 80});
  CHECK(p.origin_b == Point{680, 80});
}

TEST_CASE("width-bound layout") {
  const LayoutPlan p = plan_layout({4000, 3000}, {4000, 3000});
  CHECK(p.scale_factor == doctest::Approx(0.3));
  CHECK(p.scaled_a == Size{1200, 900});
  CHECK(p.scaled_b == Size{1200, 900});
  CHECK(p.canvas == Size{3060, 1060});
}

TEST_CASE("height-bound layout") {
  const LayoutPlan p = plan_layout({10, 2000}, {10, 2000});
  CHECK(p.scale_factor == doctest::Approx(0.64));
  CHECK(p.canvas.height == 1440);
  CHECK(p.scaled_a == Size{6, 1280});
  CHECK(p.canvas == Size{672, 1440});
}

TEST_CASE("two single pixels") {
  const Raster a(1, 1, {10, 20, 30}), b(1, 1, {40, 50, 60});
  const Raster out = compose(a, b);
  CHECK(out.size() == Size{662, 161});
  CHECK(out.at(80, 80) == Rgb{10, 20, 30});
  CHECK(out.at(581, 80) == Rgb{40, 50, 60});
  int non_background = 0;
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) non_background += out.at(x, y) == Rgb{} ? 0 : 1;
  CHECK(non_background == 2);
}

TEST_CASE("plans agree with the cap-inequality oracle and honour the invariants") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(1, 9000);
  const ComposeConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    const int wa = dim(rng), ha = dim(rng), wb = dim(rng), hb = dim(rng);
    const LayoutPlan p = plan_layout({wa, ha}, {wb, hb}, cfg);
    const auto o = oracle::layout(wa, ha, wb, hb);
    CHECK(p.scale_factor == doctest::Approx(o.s));
    CHECK(p.canvas.width <= cfg.max_width_px);
    CHECK(p.canvas.height <= cfg.max_height_px);
    CHECK(p.canvas.height == o.canvas_h);
    CHECK(p.scale_factor <= 1.0);
    CHECK(p.origin_b.x == p.origin_a.x + p.scaled_a.width + cfg.gap_px);
    CHECK(p.origin_a.x >= cfg.border_px);
    CHECK(p.origin_a.y >= cfg.border_px);
    CHECK(p.origin_b.y >= cfg.border_px);
    // Sub-pixel clamping can only shave the widths; otherwise the oracle matches exactly.
    CHECK(p.canvas.width <= o.canvas_w);
  }
}

TEST_CASE("enlarging the caps never shrinks the scale factor") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 6000), grow(0, 2000);
  for (int i = 0; i < 300; ++i) {
    const Size a{dim(rng), dim(rng)}, b{dim(rng), dim(rng)};
    ComposeConfig small, large;
    large.max_width_px += grow(rng);
    large.max_height_px += grow(rng);
    CHECK(plan_layout(a, b, large).scale_factor >= plan_layout(a, b, small).scale_factor);
  }
}

TEST_CASE("compose output matches the plan; everything outside the images is background") {
  ComposeConfig cfg;
  cfg.gap_px = 12;
  cfg.border_px = 5;
  cfg.max_width_px = 160;
  cfg.max_height_px = 90;
  cfg.background = {0, 0, 255};
  const Raster a = gradient(120, 40, 0), b = gradient(30, 100, 99);
  const LayoutPlan p = plan_layout(a.size(), b.size(), cfg);
  const Raster out = compose(a, b, cfg);
  CHECK(out.size() == p.canvas);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      if (outside(p, x, y)) REQUIRE(out.at(x, y) == cfg.background);
}

TEST_CASE("swapping equal-size inputs swaps them across the gap") {
  const Raster a = gradient(50, 30, 1), b = gradient(50, 30, 200);
  const Raster ab = compose(a, b), ba = compose(b, a);
  REQUIRE(ab.size() == ba.size());
  const LayoutPlan p = plan_layout(a.size(), b.size());
  for (int y = 0; y < p.scaled_a.height; ++y)
    for (int x = 0; x < p.scaled_a.width; ++x) {
      CHECK(ab.at(p.origin_a.x + x, p.origin_a.y + y) == ba.at(p.origin_b.x + x, p.origin_b.y + y));
      CHECK(ab.at(p.origin_b.x + x, p.origin_b.y + y) == ba.at(p.origin_a.x + x, p.origin_a.y + y));
    }
}

TEST_CASE("composition is deterministic and matches the reviewed golden image") {
  ComposeConfig cfg;
  cfg.gap_px = 10;
  cfg.border_px = 4;
  cfg.max_width_px = 200;
  cfg.max_height_px = 100;
  const Raster a = gradient(160, 90, 0), b = gradient(64, 120, 128);
  const Raster out = compose(a, b, cfg);
  CHECK(out == compose(a, b, cfg));
  const auto golden = fixtures::data("golden_pair.png");
  if (std::getenv("LIVRANK_UPDATE_GOLDEN")) write_image(golden, out);
  CHECK(read_image(golden) == out);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(plan_layout({0, 10}, {10, 10}), DataError);
  ComposeConfig tight;
  tight.max_width_px = 2 * tight.border_px + tight.gap_px + 1;
  CHECK_THROWS_AS(plan_layout({10, 10}, {10, 10}, tight), ConfigError);
  ComposeConfig negative;
  negative.gap_px = -1;
  CHECK_THROWS_AS(negative.validate(), ConfigError);
  CHECK_THROWS_AS(decode_image("not an image"), DataError);
  CHECK_THROWS_AS(read_image(fixtures::data("missing.png")), DataError);
}

TEST_CASE("PNG and JPEG round trips") {
  const auto dir = fixtures::scratch("imageio");
  const Raster img = gradient(33, 21, 5);
  write_image(dir / "x.png", img);
  CHECK(read_image(dir / "x.png") == img);
  write_image(dir / "x.jpg", img);
  const Raster j = read_image(dir / "x.jpg");
  CHECK(j.size() == img.size());
  CHECK(decode_image(encode_png(img)) == img);
  CHECK(png_data_url(img).rfind("data:image/png;base64,", 0) == 0);
  CHECK_THROWS_AS(write_image(dir / "x.gif", img), ConfigError);
  std::filesystem::remove_all(dir);
}
