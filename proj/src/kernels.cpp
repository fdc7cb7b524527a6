#include "livrank/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace livrank::kernels {

namespace {

struct Tap {
  int i0;
  int i1;
  double frac;
};

inline Tap tap(int dst_index, int dst_len, int src_len) {
  double s = (dst_index + 0.5) * static_cast<double>(src_len) / dst_len - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
  const int i0 = static_cast<int>(s);
  return {i0, std::min(i0 + 1, src_len - 1), s - i0};
}

inline void resample_row(ConstImageView src, ImageView dst, int y) {
  const Tap ty = tap(y, dst.height, src.height);
  const std::size_t row0 = static_cast<std::size_t>(ty.i0) * src.width * 3;
  const std::size_t row1 = static_cast<std::size_t>(ty.i1) * src.width * 3;
  std::uint8_t* out = dst.pixels.data() + static_cast<std::size_t>(y) * dst.width * 3;
  for (int x = 0; x < dst.width; ++x) {
    const Tap tx = tap(x, dst.width, src.width);
    const std::size_t c0 = static_cast<std::size_t>(tx.i0) * 3;
    const std::size_t c1 = static_cast<std::size_t>(tx.i1) * 3;
    for (int ch = 0; ch < 3; ++ch) {
      const double top = src.pixels[row0 + c0 + ch] * (1.0 - tx.frac) + src.pixels[row0 + c1 + ch] * tx.frac;
      const double bot = src.pixels[row1 + c0 + ch] * (1.0 - tx.frac) + src.pixels[row1 + c1 + ch] * tx.frac;
      const double v = top * (1.0 - ty.frac) + bot * ty.frac;
      out[static_cast<std::size_t>(x) * 3 + ch] = static_cast<std::uint8_t>(std::clamp(v + 0.5, 0.0, 255.0));
    }
  }
}

double column_r2(const Eigen::MatrixXd& z, Eigen::Index j) {
  const Eigen::Index n = z.rows();
  const Eigen::Index p = z.cols();
  const Eigen::VectorXd target = z.col(j);
  const double mean = target.mean();
  const double sst = (target.array() - mean).square().sum();
  if (sst <= 0.0) return 1.0;  // constant column is collinear with the intercept

  Eigen::MatrixXd design(n, p);
  design.col(0).setOnes();
  for (Eigen::Index c = 0, k = 1; c < p; ++c)
    if (c != j) design.col(k++) = z.col(c);

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd beta = qr.solve(target);
  const double ssr = (target - design * beta).squaredNorm();
  return 1.0 - ssr / sst;
}

}  // namespace

namespace serial {

void resample_bilinear(ConstImageView src, ImageView dst) {
  for (int y = 0; y < dst.height; ++y) resample_row(src, dst, y);
}

std::int64_t total_displacement(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
  return sum;
}

std::vector<double> auxiliary_r2(const Eigen::MatrixXd& regressors) {
  std::vector<double> r2(static_cast<std::size_t>(regressors.cols()));
  for (Eigen::Index j = 0; j < regressors.cols(); ++j) r2[static_cast<std::size_t>(j)] = column_r2(regressors, j);
  return r2;
}

}  // namespace serial

namespace parallel {

void resample_bilinear(ConstImageView src, ImageView dst) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < dst.height; ++y) resample_row(src, dst, y);
}

std::int64_t total_displacement(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  std::int64_t sum = 0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) sum += std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
  return sum;
}

std::vector<double> auxiliary_r2(const Eigen::MatrixXd& regressors) {
  const Eigen::Index p = regressors.cols();
  std::vector<double> r2(static_cast<std::size_t>(p));
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < p; ++j) r2[static_cast<std::size_t>(j)] = column_r2(regressors, j);
  return r2;
}

}  // namespace parallel

}  // namespace livrank::kernels
