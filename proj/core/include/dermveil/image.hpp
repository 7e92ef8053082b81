#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dermveil {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct PixelCoord {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

struct PointF {
  double row = 0.0;
  double col = 0.0;
};

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// 8-bit RGB raster, row-major.
class RgbImage {
 public:
  RgbImage(int width, int height, Rgb fill = {});
  RgbImage(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  ImageSize size() const noexcept { return {width_, height_}; }
  std::size_t pixel_count() const noexcept { return pixels_.size(); }

  const Rgb& at(int row, int col) const { return pixels_[index(row, col)]; }
  Rgb& at(int row, int col) { return pixels_[index(row, col)]; }

  std::span<const Rgb> pixels() const noexcept { return pixels_; }
  std::span<Rgb> pixels() noexcept { return pixels_; }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// One boolean per pixel, aligned with an image of the same size.
class BinaryMask {
 public:
  BinaryMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  ImageSize size() const noexcept { return {width_, height_}; }
  std::size_t pixel_count() const noexcept { return bits_.size(); }

  bool test(int row, int col) const { return bits_[index(row, col)] != 0; }
  void set(int row, int col, bool value = true) {
    bits_[index(row, col)] = value ? 1 : 0;
  }
  bool test_index(std::size_t i) const { return bits_[i] != 0; }
  void set_index(std::size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  /// Raw 0/1 bytes, row-major.
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool is_subset_of(const BinaryMask& other) const;
  BinaryMask operator&(const BinaryMask& other) const;
  BinaryMask operator|(const BinaryMask& other) const;
  BinaryMask operator~() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace dermveil
