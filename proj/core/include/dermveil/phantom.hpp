#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dermveil/annotate.hpp"
#include "dermveil/image.hpp"

namespace dermveil {

enum class PhantomShape { Disk, Ellipse, Irregular };

PhantomShape parse_phantom_shape(std::string_view text);
std::string_view to_string(PhantomShape shape);

/// Synthetic dermoscopy-like scene: skin background, a pigmented lesion
/// bounded by a B-spline border and an optional blue-white disk.
struct PhantomSpec {
  std::string image_id = "phantom";
  int width = 256;
  int height = 256;
  PhantomShape shape = PhantomShape::Ellipse;
  double semi_major = 80.0;  // disk radius / ellipse semi-axis / irregular base radius
  double semi_minor = 60.0;
  double veil_fraction = 0.0;  // target veil area over lesion area; 0 = no veil
  double noise_sigma = 6.0;
  int border_points = 24;
  Rgb skin{205, 150, 130};
  Rgb lesion{140, 90, 65};
  Rgb veil{100, 120, 165};
  Diagnosis diagnosis = Diagnosis::Benign;
};

struct Phantom {
  RgbImage image;
  Annotation annotation;
  BinaryMask lesion;  // equals border_mask(annotation.border, ...)
  BinaryMask veil;    // ground truth, subset of lesion
};

/// Deterministic in (spec, seed). Throws Degenerate when the lesion does not
/// fit the image or the veil disk does not fit inside the lesion.
Phantom generate_phantom(const PhantomSpec& spec, std::uint64_t seed);

}  // namespace dermveil
