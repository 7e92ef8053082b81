#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dermveil/image.hpp"

namespace dermveil {

/// Closed loop of border control points in (row, col) pixel coordinates.
/// Holds at least three points with no two consecutive points equal
/// (the last-to-first wrap included).
class ControlPolygon {
 public:
  explicit ControlPolygon(std::vector<PointF> points);

  std::span<const PointF> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<PointF> points_;
};

/// Exact Euclidean distance to the nearest foreground pixel of a mask.
class DistanceField {
 public:
  DistanceField(int width, int height, std::vector<std::int64_t> squared);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  double at(int row, int col) const;
  /// Squared distance as an exact integer.
  std::int64_t squared_at(int row, int col) const {
    return squared_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const std::int64_t> squared() const noexcept { return squared_; }

 private:
  int width_;
  int height_;
  std::vector<std::int64_t> squared_;
};

/// Samples the closed uniform quadratic B-spline defined by `poly`.
/// Returns size() * samples_per_segment + 1 points; the last point repeats
/// the first exactly.
std::vector<PointF> spline_close(const ControlPolygon& poly, int samples_per_segment);

/// Smallest per-segment sample count that keeps consecutive curve samples at
/// most `max_spacing` pixels apart.
int auto_samples_per_segment(const ControlPolygon& poly, double max_spacing = 0.5);

/// Rasterizes a closed curve as an 8-connected loop and fills it. Curve
/// pixels count as foreground. Throws InvalidPolygon for an open curve, a
/// curve leaving the image, or one enclosing (near) zero area.
BinaryMask rasterize_filled(std::span<const PointF> curve, int width, int height);

/// Convenience: spline_close + rasterize_filled with automatic sampling.
BinaryMask border_mask(const ControlPolygon& poly, int width, int height);

/// Exact EDT (separable lower-envelope algorithm). Throws EmptyMask.
DistanceField distance_field(const BinaryMask& mask);

struct OuterRings {
  BinaryMask skip;
  BinaryMask sample;
  bool truncated = false;
};

/// Background pixels ranked by distance to the lesion (ties in row-major
/// order): the first floor(skip_fraction * area) form `skip`, the next
/// floor(take_fraction * area) form `sample`.
OuterRings outer_rings(const BinaryMask& lesion, double skip_fraction,
                       double take_fraction);

/// Odd-window majority vote with replicated borders.
BinaryMask majority_filter(const BinaryMask& mask, int window = 5);

/// Foreground pixels with a 4-neighbor that is background or off-image,
/// in row-major order.
std::vector<PixelCoord> boundary_pixels(const BinaryMask& mask);

}  // namespace dermveil
