#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace livrank {

/// Writes `content` to a temporary sibling of `path` and renames it into place,
/// so a reader never observes a partially written file under the final name.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

/// Standard base64 (RFC 4648, padded).
std::string base64_encode(std::string_view bytes);

}  // namespace livrank
