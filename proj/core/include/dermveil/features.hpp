#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dermveil/feature_vector.hpp"
#include "dermveil/image.hpp"

namespace dermveil {

// ---------------------------------------------------------------------------
// Background skin
// ---------------------------------------------------------------------------

struct SkinColor {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

/// Empirical skin rule: R > 90, R > B and R > G (all strict).
constexpr bool is_skin_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return r > 90 && r > b && r > g;
}

/// Mean color of the skin-rule pixels in the sample ring around the lesion.
/// The innermost `skip_fraction` ring is ignored. Throws Degenerate when no
/// ring pixel passes the skin rule.
SkinColor background_skin_color(const RgbImage& image, const BinaryMask& lesion,
                                double skip_fraction = 0.10, double take_fraction = 0.20);

// ---------------------------------------------------------------------------
// Color features F1..F15
// ---------------------------------------------------------------------------

struct ColorFeatures {
  std::array<double, 15> values{};
  // Set when a denominator vanished and the neutral (1/3, 1/3, 1/3) was used.
  bool chromaticity_fallback = false;      // F1-F3
  bool normalized_ratio_fallback = false;  // F7-F9
  bool normalized_diff_fallback = false;   // F13-F15
};

/// Chromaticity, relative ratio, normalized ratio, relative difference and
/// normalized difference of a lesion pixel against the skin color. Skin
/// channels are clamped to >= 1 before the ratios.
ColorFeatures color_features(Rgb pixel, SkinColor skin);

// ---------------------------------------------------------------------------
// Texture features F16..F18
// ---------------------------------------------------------------------------

enum class GlcmDirection { Deg0, Deg45, Deg90, Deg135 };
inline constexpr std::array<GlcmDirection, 4> kGlcmDirections = {
    GlcmDirection::Deg0, GlcmDirection::Deg45, GlcmDirection::Deg90, GlcmDirection::Deg135};

/// (row, col) displacement of the second pixel of a pair.
constexpr std::array<int, 2> glcm_offset(GlcmDirection dir) {
  switch (dir) {
    case GlcmDirection::Deg0: return {0, 1};
    case GlcmDirection::Deg45: return {-1, 1};
    case GlcmDirection::Deg90: return {-1, 0};
    case GlcmDirection::Deg135: return {-1, -1};
  }
  return {0, 1};
}

/// Normalized, non-symmetric co-occurrence matrix.
class Glcm {
 public:
  explicit Glcm(int levels) : levels_(levels), p_(static_cast<std::size_t>(levels) * levels, 0.0) {}

  int levels() const noexcept { return levels_; }
  double at(int a, int b) const { return p_[static_cast<std::size_t>(a) * levels_ + b]; }
  double& at(int a, int b) { return p_[static_cast<std::size_t>(a) * levels_ + b]; }
  std::span<const double> values() const noexcept { return p_; }

 private:
  int levels_;
  std::vector<double> p_;
};

/// Luminance 0.299 R + 0.587 G + 0.114 B.
double luminance(Rgb pixel);
/// Fixed global bins over [0, 255]: floor(lum * levels / 256).
int quantize_luminance(double lum, int levels);

/// Co-occurrence of ordered pairs (p, p + offset) inside a side x side
/// window of gray levels. Throws InvalidArgument when no pair fits.
Glcm glcm(std::span<const int> window, int side, GlcmDirection direction, int levels);

struct TextureFeatures {
  double entropy = 0.0;      // F16, log base 2
  double contrast = 0.0;     // F17
  double correlation = 0.0;  // F18, 0 when either marginal has zero variance
};

TextureFeatures texture_statistics(const Glcm& matrix);

/// Statistics averaged over the four directions.
TextureFeatures texture_features(std::span<const int> window, int side, int levels);

// ---------------------------------------------------------------------------
// Medians
// ---------------------------------------------------------------------------

/// 13th order statistic of exactly 25 values by a 99-exchange selection
/// network. Throws InvalidArgument for any other count.
double median25(std::span<const double> values);

/// Same network, in place; the median ends up in values[12].
void median25_network(std::array<double, 25>& values);

/// The network's compare-exchange pairs (i, j): min to i, max to j.
std::span<const std::array<std::uint8_t, 2>> median25_exchanges();

// ---------------------------------------------------------------------------
// Feature planes
// ---------------------------------------------------------------------------

struct FeatureConfig {
  int window = 5;        // contextual neighborhood (texture window and median)
  int glcm_levels = 16;
};

using PlaneSelection = std::bitset<kFeatureCount>;
inline PlaneSelection all_planes() { return PlaneSelection().set(); }

struct ExtractionStats {
  std::size_t color_pixels = 0;    // pixels whose color features were computed
  std::size_t texture_windows = 0; // GLCM windows evaluated
};

/// Per-feature rasters defined on lesion pixels; index k holds F(k+1).
class FeaturePlanes {
 public:
  FeaturePlanes(int width, int height, BinaryMask valid);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const BinaryMask& valid() const noexcept { return valid_; }

  bool has(int feature) const { return present_.test(feature); }
  PlaneSelection present() const noexcept { return present_; }
  double at(int feature, int row, int col) const {
    return planes_[feature][static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const double> plane(int feature) const { return planes_[feature]; }
  std::vector<double>& mutable_plane(int feature);

  FeatureVector vector_at(int row, int col) const;

  ExtractionStats stats;

 private:
  int width_;
  int height_;
  BinaryMask valid_;
  PlaneSelection present_;
  std::array<std::vector<double>, kFeatureCount> planes_;
};

/// Raw per-pixel features followed by a window x window median restricted
/// to lesion pixels (lower middle value for even counts). Only the selected
/// planes are computed; texture work is skipped when no texture plane is
/// selected.
FeaturePlanes extract_feature_planes(const RgbImage& image, const BinaryMask& lesion,
                                     SkinColor skin, const FeatureConfig& config = {},
                                     PlaneSelection which = all_planes());

/// Median step alone, exposed for testing: replaces each valid pixel with the
/// median of the valid values in its window.
std::vector<double> masked_median(std::span<const double> plane, const BinaryMask& valid,
                                  int window);

/// Writes one plane as "DVPLANE\n<width> <height> <feature-number>\n"
/// followed by little-endian float32 values (0 outside the lesion).
void write_feature_plane(const std::filesystem::path& path, const FeaturePlanes& planes,
                         int feature);

}  // namespace dermveil
