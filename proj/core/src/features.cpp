#include "dermveil/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "dermveil/error.hpp"
#include "dermveil/image_io.hpp"
#include "dermveil/raster.hpp"

namespace dermveil {
namespace {

constexpr double kThird = 1.0 / 3.0;
constexpr int kFirstTexturePlane = 15;

void normalize_triplet(double a, double b, double c, double* out, bool& fallback,
                       bool exact_zero) {
  const double sum = a + b + c;
  const bool degenerate = exact_zero ? sum == 0.0 : std::abs(sum) < 1e-9;
  if (degenerate) {
    out[0] = out[1] = out[2] = kThird;
    fallback = true;
    return;
  }
  out[0] = a / sum;
  out[1] = b / sum;
  out[2] = c / sum;
}

}  // namespace

SkinColor background_skin_color(const RgbImage& image, const BinaryMask& lesion,
                                double skip_fraction, double take_fraction) {
  if (image.size() != lesion.size()) {
    throw Error(ErrorKind::InvalidArgument, "lesion mask size differs from image size");
  }
  const OuterRings rings = outer_rings(lesion, skip_fraction, take_fraction);
  double sr = 0.0, sg = 0.0, sb = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < rings.sample.pixel_count(); ++i) {
    if (!rings.sample.test_index(i)) continue;
    const Rgb p = image.pixels()[i];
    if (!is_skin_pixel(p.r, p.g, p.b)) continue;
    sr += p.r;
    sg += p.g;
    sb += p.b;
    ++n;
  }
  if (n == 0) {
    throw Error(ErrorKind::Degenerate,
                "no pixel in the background ring passes the skin rule; widen the ring "
                "or supply the skin color manually");
  }
  return {sr / n, sg / n, sb / n};
}

ColorFeatures color_features(Rgb pixel, SkinColor skin) {
  ColorFeatures out;
  double* f = out.values.data();
  const double r = pixel.r;
  const double g = pixel.g;
  const double b = pixel.b;

  normalize_triplet(r, g, b, f + 0, out.chromaticity_fallback, true);

  f[3] = r / std::max(skin.r, 1.0);
  f[4] = g / std::max(skin.g, 1.0);
  f[5] = b / std::max(skin.b, 1.0);
  normalize_triplet(f[3], f[4], f[5], f + 6, out.normalized_ratio_fallback, true);

  f[9] = r - skin.r;
  f[10] = g - skin.g;
  f[11] = b - skin.b;
  // Signed sum: cancellation counts as degenerate, not just the all-zero case.
  normalize_triplet(f[9], f[10], f[11], f + 12, out.normalized_diff_fallback, false);
  return out;
}

FeaturePlanes::FeaturePlanes(int width, int height, BinaryMask valid)
    : width_(width), height_(height), valid_(std::move(valid)) {}

std::vector<double>& FeaturePlanes::mutable_plane(int feature) {
  present_.set(feature);
  auto& plane = planes_[feature];
  plane.resize(static_cast<std::size_t>(width_) * height_, 0.0);
  return plane;
}

FeatureVector FeaturePlanes::vector_at(int row, int col) const {
  FeatureVector v{};
  for (int k = 0; k < kFeatureCount; ++k) {
    if (!present_.test(k)) {
      throw Error(ErrorKind::InvalidArgument,
                  "feature F" + std::to_string(k + 1) + " was not extracted");
    }
    v[k] = at(k, row, col);
  }
  return v;
}

FeaturePlanes extract_feature_planes(const RgbImage& image, const BinaryMask& lesion,
                                     SkinColor skin, const FeatureConfig& config,
                                     PlaneSelection which) {
  if (image.size() != lesion.size()) {
    throw Error(ErrorKind::InvalidArgument, "lesion mask size differs from image size");
  }
  if (lesion.empty()) throw Error(ErrorKind::EmptyMask, "lesion mask is empty");
  if (config.window < 3 || config.window % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "feature window must be odd and >= 3");
  }
  if (config.glcm_levels < 2) {
    throw Error(ErrorKind::InvalidArgument, "glcm_levels must be >= 2");
  }

  const int w = image.width();
  const int h = image.height();
  FeaturePlanes planes(w, h, lesion);

  // Raw values first, then the contextual median per plane.
  std::array<std::vector<double>, kFeatureCount> raw;
  for (int k = 0; k < kFeatureCount; ++k) {
    if (which.test(k)) raw[k].assign(static_cast<std::size_t>(w) * h, 0.0);
  }

  bool any_color = false;
  for (int k = 0; k < kFirstTexturePlane; ++k) any_color |= which.test(k);
  if (any_color) {
    for (std::size_t i = 0; i < lesion.pixel_count(); ++i) {
      if (!lesion.test_index(i)) continue;
      const ColorFeatures cf = color_features(image.pixels()[i], skin);
      for (int k = 0; k < kFirstTexturePlane; ++k) {
        if (which.test(k)) raw[k][i] = cf.values[k];
      }
      ++planes.stats.color_pixels;
    }
  }

  const bool any_texture = which.test(15) || which.test(16) || which.test(17);
  if (any_texture) {
    const int levels = config.glcm_levels;
    std::vector<int> quantized(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < quantized.size(); ++i) {
      quantized[i] = quantize_luminance(luminance(image.pixels()[i]), levels);
    }
    const int side = config.window;
    const int half = side / 2;
    std::vector<int> window(static_cast<std::size_t>(side) * side);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (!lesion.test(r, c)) continue;
        for (int dr = -half; dr <= half; ++dr) {
          const int rr = std::clamp(r + dr, 0, h - 1);
          for (int dc = -half; dc <= half; ++dc) {
            const int cc = std::clamp(c + dc, 0, w - 1);
            window[static_cast<std::size_t>(dr + half) * side + (dc + half)] =
                quantized[static_cast<std::size_t>(rr) * w + cc];
          }
        }
        const TextureFeatures t = texture_features(window, side, levels);
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        if (which.test(15)) raw[15][i] = t.entropy;
        if (which.test(16)) raw[16][i] = t.contrast;
        if (which.test(17)) raw[17][i] = t.correlation;
        ++planes.stats.texture_windows;
      }
    }
  }

  for (int k = 0; k < kFeatureCount; ++k) {
    if (!which.test(k)) continue;
    planes.mutable_plane(k) = masked_median(raw[k], lesion, config.window);
  }
  return planes;
}

void write_feature_plane(const std::filesystem::path& path, const FeaturePlanes& planes,
                         int feature) {
  if (feature < 0 || feature >= kFeatureCount || !planes.has(feature)) {
    throw Error(ErrorKind::InvalidArgument,
                "plane F" + std::to_string(feature + 1) + " is not available");
  }
  std::string out = "DVPLANE\n" + std::to_string(planes.width()) + " " +
                    std::to_string(planes.height()) + " " + std::to_string(feature + 1) + "\n";
  const auto values = planes.plane(feature);
  out.reserve(out.size() + values.size() * 4);
  for (const double v : values) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    char bytes[4];
    std::memcpy(bytes, &bits, 4);
    out.append(bytes, 4);
  }
  write_file_atomic(path, out);
}

}  // namespace dermveil
