#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dermveil/feature_vector.hpp"
#include "dermveil/image.hpp"
#include "dermveil/raster.hpp"

namespace dermveil {

enum class RegionLabel { NonVeil = 0, Veil = 1 };
enum class Diagnosis { Benign = 0, Melanoma = 1 };

std::string_view to_string(RegionLabel label);
std::string_view to_string(Diagnosis diagnosis);
RegionLabel parse_region_label(std::string_view text);
Diagnosis parse_diagnosis(std::string_view text);

struct Circle {
  double center_row = 0.0;
  double center_col = 0.0;
  double radius = 1.0;
  RegionLabel label = RegionLabel::NonVeil;

  bool contains(int row, int col) const {
    const double dr = row - center_row;
    const double dc = col - center_col;
    return dr * dr + dc * dc <= radius * radius;
  }

  friend bool operator==(const Circle&, const Circle&) = default;
};

struct RegionAnnotation {
  std::vector<Circle> circles;

  friend bool operator==(const RegionAnnotation&, const RegionAnnotation&) = default;
};

struct LesionRecord {
  std::string image_id;
  Diagnosis diagnosis = Diagnosis::Benign;
  bool has_veil_area = false;
  bool primary_veil = false;
  bool veil_related = false;

  friend bool operator==(const LesionRecord&, const LesionRecord&) = default;
};

/// Everything a human annotator supplies for one image.
struct Annotation {
  ControlPolygon border;
  RegionAnnotation regions;
  LesionRecord record;
  std::optional<ImageSize> image_size;
};

/// Parses and validates an annotation document. Circles and border points
/// are bounds-checked against `expected_size` or the document's own
/// width/height (they must agree when both are present).
Annotation parse_annotation(std::string_view json_text,
                            std::optional<ImageSize> expected_size = std::nullopt);
Annotation load_annotation(const std::filesystem::path& path,
                           std::optional<ImageSize> expected_size = std::nullopt);
std::string annotation_to_json(const Annotation& annotation);
void save_annotation(const std::filesystem::path& path, const Annotation& annotation);

struct PixelSample {
  std::string image_id;
  int row = 0;
  int col = 0;
  RegionLabel label = RegionLabel::NonVeil;
  FeatureVector features{};
};

/// Draws exactly `per_class` pixels of each label, uniformly without
/// replacement from the union of that label's circles. Pixels covered by
/// circles of both labels are excluded, as are pixels outside `domain` when
/// one is given. Output: non-veil samples then veil samples, each row-major.
std::vector<PixelSample> sample_pixels(const std::string& image_id,
                                       const RegionAnnotation& regions, ImageSize size,
                                       int per_class, std::uint64_t seed,
                                       const BinaryMask* domain = nullptr);

}  // namespace dermveil
