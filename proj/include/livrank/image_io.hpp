#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "livrank/composer.hpp"

namespace livrank {

/// Decodes PNG/JPEG (anything the codec backend reads) into RGB.
Raster read_image(const std::filesystem::path& path);
Raster decode_image(std::string_view bytes, std::string_view label = "image");

/// Format is chosen from the extension (.png, .jpg, .jpeg).
void write_image(const std::filesystem::path& path, const Raster& image);
std::string encode_png(const Raster& image);

/// `data:image/png;base64,...`
std::string png_data_url(const Raster& image);

}  // namespace livrank
