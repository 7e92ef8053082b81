#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dermveil/image.hpp"

namespace dermveil {

// Images: PNG (8/16-bit gray, RGB, with or without alpha) or binary PPM (P6).
// Masks: PNG or binary PGM (P5); 0 is background, >= 128 foreground; written as 0/255.
// Format is chosen by file extension on write and by magic bytes on read.

RgbImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const RgbImage& image);

BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace dermveil
