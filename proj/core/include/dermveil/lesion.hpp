#pragma once

#include "dermveil/annotate.hpp"
#include "dermveil/dtree.hpp"
#include "dermveil/image.hpp"

namespace dermveil {

/// Central moments of a binary region (row index i, column index j).
struct Moments {
  double m00 = 0.0;
  double mu11 = 0.0;
  double mu20 = 0.0;  // sum (i - r)^2
  double mu02 = 0.0;  // sum (j - c)^2
  double centroid_row = 0.0;
  double centroid_col = 0.0;
};

Moments central_moments(const BinaryMask& mask);

struct LesionShapeFeatures {
  double s1 = 0.0;  // veil area / lesion area
  double s2 = 0.0;  // circularity m_R / sigma_R
  double s3 = 0.0;  // ellipticity
};

inline constexpr double kCircularityCap = 1e6;

/// Fraction of lesion pixels covered by the veil mask.
double veil_ratio(const BinaryMask& veil, const BinaryMask& lesion);

/// Mean over standard deviation (population) of boundary-pixel distances to
/// the region centroid; capped at kCircularityCap when the spread vanishes.
double circularity(const BinaryMask& lesion);

/// Affine moment invariant A1 = (mu20 mu02 - mu11^2) / mu00^4 folded around
/// its ellipse value 1/(16 pi^2), so 1 means a perfect ellipse.
double ellipticity(const BinaryMask& lesion);

LesionShapeFeatures shape_features(const BinaryMask& veil, const BinaryMask& lesion);

using LesionClass = Diagnosis;

/// Fixed lesion classifier over (S1, S2, S3): S1 < 0.009 is benign; otherwise
/// S3 > 0.979 is benign; otherwise melanoma. S2 is never tested.
DecisionTree reference_lesion_model();

/// Applies a lesion tree over (S1, S2, S3) whose classes include "benign"
/// and "melanoma".
LesionClass classify_lesion(const LesionShapeFeatures& features, const DecisionTree& model);

}  // namespace dermveil
