#include "livrank/image_io.hpp"

#include <cctype>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "livrank/error.hpp"
#include "livrank/io.hpp"

namespace livrank {

namespace {

Raster from_bgr(const cv::Mat& bgr, std::string_view label) {
  if (bgr.empty() || bgr.cols <= 0 || bgr.rows <= 0) throw DataError(std::string(label) + ": zero-area image");
  Raster out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) out.set(x, y, {row[x][2], row[x][1], row[x][0]});
  }
  return out;
}

cv::Mat to_bgr(const Raster& img) {
  if (img.width <= 0 || img.height <= 0) throw DataError("cannot encode a zero-area image");
  cv::Mat m(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    auto* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width; ++x) {
      const Rgb c = img.at(x, y);
      row[x] = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  return m;
}

}  // namespace

Raster read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError(path.string() + ": image not found");
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (m.empty()) throw DataError(path.string() + ": undecodable image");
  return from_bgr(m, path.string());
}

Raster decode_image(std::string_view bytes, std::string_view label) {
  std::vector<uchar> buf(bytes.begin(), bytes.end());
  cv::Mat m = buf.empty() ? cv::Mat() : cv::imdecode(buf, cv::IMREAD_COLOR);
  if (m.empty()) throw DataError(std::string(label) + ": undecodable image");
  return from_bgr(m, label);
}

void write_image(const std::filesystem::path& path, const Raster& image) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext != ".png" && ext != ".jpg" && ext != ".jpeg")
    throw ConfigError(path.string() + ": output must be .png, .jpg or .jpeg");
  std::vector<uchar> buf;
  std::vector<int> params;
  if (ext == ".png") params = {cv::IMWRITE_PNG_COMPRESSION, 6};
  else params = {cv::IMWRITE_JPEG_QUALITY, 95};
  if (!cv::imencode(ext, to_bgr(image), buf, params)) throw DataError(path.string() + ": encoding failed");
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(buf.data()), buf.size()));
}

std::string encode_png(const Raster& image) {
  std::vector<uchar> buf;
  if (!cv::imencode(".png", to_bgr(image), buf)) throw DataError("PNG encoding failed");
  return std::string(buf.begin(), buf.end());
}

std::string png_data_url(const Raster& image) {
  return "data:image/png;base64," + base64_encode(encode_png(image));
}

}  // namespace livrank
