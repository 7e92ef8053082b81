#include <algorithm>
#include <cmath>
#include <string>

#include "dermveil/error.hpp"
#include "dermveil/features.hpp"

namespace dermveil {

double luminance(Rgb pixel) {
  return 0.299 * pixel.r + 0.587 * pixel.g + 0.114 * pixel.b;
}

int quantize_luminance(double lum, int levels) {
  const int level = static_cast<int>(std::floor(lum * levels / 256.0));
  return std::clamp(level, 0, levels - 1);
}

Glcm glcm(std::span<const int> window, int side, GlcmDirection direction, int levels) {
  if (levels < 2) throw Error(ErrorKind::InvalidArgument, "GLCM needs at least 2 gray levels");
  if (side < 1 || window.size() != static_cast<std::size_t>(side) * side) {
    throw Error(ErrorKind::InvalidArgument, "GLCM window must hold side*side values");
  }
  const auto [dr, dc] = glcm_offset(direction);
  const int pairs = (side - std::abs(dr)) * (side - std::abs(dc));
  if (pairs <= 0) {
    throw Error(ErrorKind::InvalidArgument,
                "window of side " + std::to_string(side) + " holds no pixel pair in this direction");
  }

  Glcm matrix(levels);
  for (int r = 0; r < side; ++r) {
    const int r2 = r + dr;
    if (r2 < 0 || r2 >= side) continue;
    for (int c = 0; c < side; ++c) {
      const int c2 = c + dc;
      if (c2 < 0 || c2 >= side) continue;
      const int a = window[static_cast<std::size_t>(r) * side + c];
      const int b = window[static_cast<std::size_t>(r2) * side + c2];
      if (a < 0 || a >= levels || b < 0 || b >= levels) {
        throw Error(ErrorKind::InvalidArgument, "gray level outside [0, levels)");
      }
      matrix.at(a, b) += 1.0;
    }
  }
  const double scale = 1.0 / pairs;
  for (int a = 0; a < levels; ++a) {
    for (int b = 0; b < levels; ++b) matrix.at(a, b) *= scale;
  }
  return matrix;
}

TextureFeatures texture_statistics(const Glcm& matrix) {
  const int levels = matrix.levels();
  TextureFeatures out;
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (int a = 0; a < levels; ++a) {
    for (int b = 0; b < levels; ++b) {
      const double p = matrix.at(a, b);
      if (p <= 0.0) continue;
      out.entropy -= p * std::log2(p);
      out.contrast += static_cast<double>((a - b) * (a - b)) * p;
      mean_a += a * p;
      mean_b += b * p;
    }
  }
  double var_a = 0.0;
  double var_b = 0.0;
  double cov = 0.0;
  for (int a = 0; a < levels; ++a) {
    for (int b = 0; b < levels; ++b) {
      const double p = matrix.at(a, b);
      if (p <= 0.0) continue;
      var_a += (a - mean_a) * (a - mean_a) * p;
      var_b += (b - mean_b) * (b - mean_b) * p;
      cov += (a - mean_a) * (b - mean_b) * p;
    }
  }
  // A non-constant marginal over k/N probabilities has variance >= 1/N^2,
  // far above this cutoff.
  const double sigma = std::sqrt(var_a) * std::sqrt(var_b);
  out.correlation = sigma > 1e-12 ? std::clamp(cov / sigma, -1.0, 1.0) : 0.0;
  return out;
}

TextureFeatures texture_features(std::span<const int> window, int side, int levels) {
  TextureFeatures mean;
  for (const GlcmDirection dir : kGlcmDirections) {
    const TextureFeatures t = texture_statistics(glcm(window, side, dir, levels));
    mean.entropy += t.entropy;
    mean.contrast += t.contrast;
    mean.correlation += t.correlation;
  }
  mean.entropy /= 4.0;
  mean.contrast /= 4.0;
  mean.correlation /= 4.0;
  return mean;
}

}  // namespace dermveil
