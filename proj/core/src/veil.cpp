#include "dermveil/veil.hpp"

#include <algorithm>
#include <string>

#include "dermveil/error.hpp"
#include "dermveil/raster.hpp"

namespace dermveil {
namespace {

constexpr Rgb kVeilOutline{255, 255, 0};
constexpr Rgb kRegionOutline{0, 255, 0};

void paint_boundary(RgbImage& out, const BinaryMask& region, int thickness, Rgb color) {
  if (region.empty()) return;
  const int half = thickness / 2;
  for (const PixelCoord& p : boundary_pixels(region)) {
    for (int dr = -half; dr <= half; ++dr) {
      for (int dc = -half; dc <= half; ++dc) {
        if (out.contains(p.row + dr, p.col + dc)) out.at(p.row + dr, p.col + dc) = color;
      }
    }
  }
}

}  // namespace

VeilDetection detect_veil(const RgbImage& image, const BinaryMask& lesion, SkinColor skin,
                          const DecisionTree& tree, const DetectionOptions& options) {
  if (image.size() != lesion.size()) {
    throw Error(ErrorKind::InvalidArgument, "lesion mask size differs from image size");
  }
  if (lesion.empty()) throw Error(ErrorKind::EmptyMask, "lesion mask is empty");
  if (tree.feature_count() != kFeatureCount) {
    throw Error(ErrorKind::InvalidArgument,
                "pixel tree must be trained on " + std::to_string(kFeatureCount) +
                    " features, this one has " + std::to_string(tree.feature_count()));
  }
  const auto veil_class = tree.class_index("veil");
  if (!veil_class) {
    throw Error(ErrorKind::InvalidArgument, "pixel tree has no class named 'veil'");
  }

  PlaneSelection which;
  for (const int f : tree.features_used()) {
    if (f < 0 || f >= kFeatureCount) {
      throw Error(ErrorKind::InvalidArgument,
                  "tree references feature F" + std::to_string(f + 1) + " outside F1..F18");
    }
    which.set(f);
  }
  if (!options.lazy) which = all_planes();

  VeilDetection out{{BinaryMask(image.width(), image.height()),
                     BinaryMask(image.width(), image.height())},
                    {},
                    which};

  // A leaf-only tree needs no features at all.
  if (which.none()) {
    if (tree.nodes()[0].label == *veil_class) out.mask.initial = lesion;
  } else {
    const FeaturePlanes planes =
        extract_feature_planes(image, lesion, skin, options.features, which);
    out.stats = planes.stats;
    FeatureVector v{};
    for (int r = 0; r < image.height(); ++r) {
      for (int c = 0; c < image.width(); ++c) {
        if (!lesion.test(r, c)) continue;
        for (int k = 0; k < kFeatureCount; ++k) v[k] = which.test(k) ? planes.at(k, r, c) : 0.0;
        if (tree.predict(v) == *veil_class) out.mask.initial.set(r, c);
      }
    }
  }
  out.mask.refined = majority_filter(out.mask.initial, options.majority_window) & lesion;
  return out;
}

RgbImage render_overlay(const RgbImage& image, const BinaryMask& lesion,
                        const BinaryMask& veil) {
  if (image.size() != lesion.size() || image.size() != veil.size()) {
    throw Error(ErrorKind::InvalidArgument, "overlay inputs differ in size");
  }
  RgbImage out = image;
  BinaryMask non_veil = lesion;
  for (std::size_t i = 0; i < non_veil.pixel_count(); ++i) {
    if (veil.test_index(i)) non_veil.set_index(i, false);
  }
  paint_boundary(out, non_veil, 1, kRegionOutline);
  paint_boundary(out, veil, 3, kVeilOutline);
  return out;
}

}  // namespace dermveil
