#include "dermveil/lesion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "dermveil/error.hpp"
#include "dermveil/raster.hpp"

namespace dermveil {

namespace {

__extension__ typedef __int128 Wide;

// Integer sums over the foreground. Central moments are formed from exact
// integer numerators (n * sum(x^2) - sum(x)^2, ...), so translating or
// flipping the mask reproduces them bit for bit.
struct RawSums {
  std::int64_t n = 0;
  std::int64_t r = 0;
  std::int64_t c = 0;
  Wide rr = 0;
  Wide cc = 0;
  Wide rc = 0;
};

RawSums raw_sums(const BinaryMask& mask) {
  RawSums s;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.test(r, c)) continue;
      ++s.n;
      s.r += r;
      s.c += c;
      s.rr += static_cast<Wide>(r) * r;
      s.cc += static_cast<Wide>(c) * c;
      s.rc += static_cast<Wide>(r) * c;
    }
  }
  if (s.n == 0) throw Error(ErrorKind::EmptyMask, "moments of an empty mask");
  return s;
}

}  // namespace

Moments central_moments(const BinaryMask& mask) {
  const RawSums s = raw_sums(mask);
  const Wide n = s.n;
  const double nd = static_cast<double>(s.n);
  Moments m;
  m.m00 = nd;
  m.centroid_row = static_cast<double>(s.r) / nd;
  m.centroid_col = static_cast<double>(s.c) / nd;
  m.mu20 = static_cast<double>(n * s.rr - static_cast<Wide>(s.r) * s.r) / nd;
  m.mu02 = static_cast<double>(n * s.cc - static_cast<Wide>(s.c) * s.c) / nd;
  m.mu11 = static_cast<double>(n * s.rc - static_cast<Wide>(s.r) * s.c) / nd;
  return m;
}

double veil_ratio(const BinaryMask& veil, const BinaryMask& lesion) {
  const std::size_t area = lesion.count();
  if (area == 0) throw Error(ErrorKind::EmptyMask, "lesion mask is empty");
  if (!veil.is_subset_of(lesion)) {
    throw Error(ErrorKind::InvalidArgument, "veil mask extends outside the lesion");
  }
  return static_cast<double>(veil.count()) / static_cast<double>(area);
}

double circularity(const BinaryMask& lesion) {
  const RawSums s = raw_sums(lesion);
  const auto boundary = boundary_pixels(lesion);
  if (boundary.size() < 2) {
    throw Error(ErrorKind::Degenerate, "circularity needs at least 2 boundary pixels");
  }
  const double n = static_cast<double>(s.n);
  std::vector<double> dist;
  dist.reserve(boundary.size());
  for (const PixelCoord& p : boundary) {
    const double dr = static_cast<double>(s.n * p.row - s.r);
    const double dc = static_cast<double>(s.n * p.col - s.c);
    dist.push_back(std::sqrt(dr * dr + dc * dc) / n);
  }
  // Summation order fixed by value, not by scan order.
  std::sort(dist.begin(), dist.end());
  double mean = 0.0;
  for (const double d : dist) mean += d;
  mean /= static_cast<double>(dist.size());
  double var = 0.0;
  for (const double d : dist) var += (d - mean) * (d - mean);
  const double sigma = std::sqrt(var / static_cast<double>(dist.size()));
  if (sigma < 1e-9) return kCircularityCap;
  return std::min(mean / sigma, kCircularityCap);
}

double ellipticity(const BinaryMask& lesion) {
  const Moments m = central_moments(lesion);
  const double spread = m.mu20 * m.mu02;
  const double det = spread - m.mu11 * m.mu11;
  if (spread <= 0.0 || det <= 1e-12 * spread) {
    throw Error(ErrorKind::Degenerate, "ellipticity of a collinear region is undefined");
  }
  const double a1 = det / std::pow(m.m00, 4);
  const double ellipse = 16.0 * std::numbers::pi * std::numbers::pi;
  return a1 <= 1.0 / ellipse ? ellipse * a1 : 1.0 / (ellipse * a1);
}

LesionShapeFeatures shape_features(const BinaryMask& veil, const BinaryMask& lesion) {
  return {veil_ratio(veil, lesion), circularity(lesion), ellipticity(lesion)};
}

DecisionTree reference_lesion_model() {
  using Node = DecisionTree::Node;
  // "<= threshold goes left", so the strict S1 < 0.009 test uses the largest
  // double below 0.009.
  const double s1_cut = std::nextafter(0.009, -std::numeric_limits<double>::infinity());
  std::vector<Node> nodes(5);
  nodes[0] = Node{0, s1_cut, 1, 2, 0, {}};
  nodes[1] = Node{-1, 0.0, -1, -1, 0, {}};  // benign
  nodes[2] = Node{2, 0.979, 3, 4, 0, {}};
  nodes[3] = Node{-1, 0.0, -1, -1, 1, {}};  // melanoma
  nodes[4] = Node{-1, 0.0, -1, -1, 0, {}};  // benign
  return DecisionTree(3, {"benign", "melanoma"}, std::move(nodes));
}

LesionClass classify_lesion(const LesionShapeFeatures& features, const DecisionTree& model) {
  if (model.feature_count() != 3) {
    throw Error(ErrorKind::InvalidArgument,
                "lesion model must use 3 features (S1, S2, S3), this one has " +
                    std::to_string(model.feature_count()));
  }
  const double v[3] = {features.s1, features.s2, features.s3};
  const std::string& name = model.class_names()[model.predict(v)];
  if (name == "melanoma") return Diagnosis::Melanoma;
  if (name == "benign") return Diagnosis::Benign;
  throw Error(ErrorKind::InvalidArgument,
              "lesion model predicted unknown class '" + name + "'");
}

}  // namespace dermveil
