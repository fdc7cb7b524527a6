#pragma once

// Data-parallel inner loops. Each kernel exists twice: a plain serial
// reference used by the tests as an oracle, and an OpenMP version used by
// the library. Both evaluate identical per-element arithmetic, so their
// results must agree bit for bit.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace livrank::kernels {

/// Interleaved 8-bit RGB pixels, row-major, no padding.
struct ConstImageView {
  int width = 0;
  int height = 0;
  std::span<const std::uint8_t> pixels;
};

struct ImageView {
  int width = 0;
  int height = 0;
  std::span<std::uint8_t> pixels;
};

namespace serial {

/// Pixel-centre-aligned bilinear resampling with edge clamping.
void resample_bilinear(ConstImageView src, ImageView dst);

/// Sum of |a[i] - b[i]|.
std::int64_t total_displacement(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

/// Centered R^2 of regressing each column of `regressors` on an intercept
/// plus all remaining columns.
std::vector<double> auxiliary_r2(const Eigen::MatrixXd& regressors);

}  // namespace serial

namespace parallel {

void resample_bilinear(ConstImageView src, ImageView dst);
std::int64_t total_displacement(std::span<const std::int32_t> a, std::span<const std::int32_t> b);
std::vector<double> auxiliary_r2(const Eigen::MatrixXd& regressors);

}  // namespace parallel

}  // namespace livrank::kernels
