#pragma once

#include "dermveil/dtree.hpp"
#include "dermveil/features.hpp"
#include "dermveil/image.hpp"

namespace dermveil {

struct VeilMask {
  BinaryMask initial;  // raw per-pixel classification
  BinaryMask refined;  // majority-filtered, clipped to the lesion
};

struct DetectionOptions {
  FeatureConfig features;
  int majority_window = 5;
  /// Extract only the planes the tree tests. Turning this off computes all
  /// eighteen; the masks are identical either way.
  bool lazy = true;
};

struct VeilDetection {
  VeilMask mask;
  ExtractionStats stats;
  PlaneSelection planes_used;
};

/// Classifies every lesion pixel with a pixel tree over F1..F18 whose class
/// list contains "veil", then smooths the result with one majority filter.
VeilDetection detect_veil(const RgbImage& image, const BinaryMask& lesion, SkinColor skin,
                          const DecisionTree& tree, const DetectionOptions& options = {});

/// Copy of `image` with the veil boundary drawn thick and the boundary of
/// the remaining (non-veil) lesion region drawn thin.
RgbImage render_overlay(const RgbImage& image, const BinaryMask& lesion,
                        const BinaryMask& veil);

}  // namespace dermveil
