#include "dermveil/image.hpp"

#include <algorithm>
#include <string>

#include "dermveil/error.hpp"

namespace dermveil {
namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "image dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

void check_same_size(const BinaryMask& a, const BinaryMask& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::InvalidArgument, "mask dimensions differ");
  }
}

}  // namespace

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 fill);
}

RgbImage::RgbImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dimensions(width, height);
  if (pixels_.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::InvalidArgument, "pixel count does not match dimensions");
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

bool BinaryMask::is_subset_of(const BinaryMask& other) const {
  check_same_size(*this, other);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

BinaryMask BinaryMask::operator&(const BinaryMask& other) const {
  check_same_size(*this, other);
  BinaryMask out(width_, height_);
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & other.bits_[i];
  return out;
}

BinaryMask BinaryMask::operator|(const BinaryMask& other) const {
  check_same_size(*this, other);
  BinaryMask out(width_, height_);
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] | other.bits_[i];
  return out;
}

BinaryMask BinaryMask::operator~() const {
  BinaryMask out(width_, height_);
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] ? 0 : 1;
  return out;
}

}  // namespace dermveil
