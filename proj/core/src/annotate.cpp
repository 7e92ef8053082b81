#include "dermveil/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "dermveil/error.hpp"
#include "dermveil/image_io.hpp"
#include "dermveil/rng.hpp"

namespace dermveil {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Schema, field + ": " + what);
}

const Json& require(const Json& doc, const char* key) {
  if (!doc.contains(key)) schema_error(key, "missing required field");
  return doc.at(key);
}

double number_at(const Json& value, const std::string& field) {
  if (!value.is_number()) schema_error(field, "expected a number");
  return value.get<double>();
}

bool flag_or_false(const Json& doc, const char* key) {
  if (!doc.contains(key)) return false;
  const Json& v = doc.at(key);
  if (!v.is_boolean()) schema_error(key, "expected true or false");
  return v.get<bool>();
}

std::string string_at(const Json& value, const std::string& field) {
  if (!value.is_string()) schema_error(field, "expected a string");
  return value.get<std::string>();
}

PointF point_at(const Json& value, const std::string& field) {
  if (!value.is_array() || value.size() != 2) schema_error(field, "expected [row, col]");
  return {number_at(value[0], field + "[0]"), number_at(value[1], field + "[1]")};
}

bool point_inside(const PointF& p, ImageSize size) {
  return p.row >= 0.0 && p.col >= 0.0 && p.row <= size.height - 1 && p.col <= size.width - 1;
}

}  // namespace

std::string_view to_string(RegionLabel label) {
  return label == RegionLabel::Veil ? "veil" : "non-veil";
}

std::string_view to_string(Diagnosis diagnosis) {
  return diagnosis == Diagnosis::Melanoma ? "melanoma" : "benign";
}

RegionLabel parse_region_label(std::string_view text) {
  if (text == "veil") return RegionLabel::Veil;
  if (text == "non-veil") return RegionLabel::NonVeil;
  throw Error(ErrorKind::Schema,
              "label: expected 'veil' or 'non-veil', got '" + std::string(text) + "'");
}

Diagnosis parse_diagnosis(std::string_view text) {
  if (text == "melanoma") return Diagnosis::Melanoma;
  if (text == "benign") return Diagnosis::Benign;
  throw Error(ErrorKind::Schema,
              "diagnosis: expected 'melanoma' or 'benign', got '" + std::string(text) + "'");
}

Annotation parse_annotation(std::string_view json_text, std::optional<ImageSize> expected_size) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("annotation JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("<root>", "expected an object");

  std::optional<ImageSize> size;
  if (doc.contains("width") || doc.contains("height")) {
    const double w = number_at(require(doc, "width"), "width");
    const double h = number_at(require(doc, "height"), "height");
    if (w < 1 || h < 1 || w != static_cast<int>(w) || h != static_cast<int>(h)) {
      schema_error("width/height", "expected positive integers");
    }
    size = ImageSize{static_cast<int>(w), static_cast<int>(h)};
  }
  if (expected_size) {
    if (size && *size != *expected_size) {
      schema_error("width/height", "document size differs from the image (" +
                                       std::to_string(expected_size->width) + "x" +
                                       std::to_string(expected_size->height) + ")");
    }
    size = expected_size;
  }

  LesionRecord record;
  record.image_id = string_at(require(doc, "image_id"), "image_id");
  if (record.image_id.empty() ||
      record.image_id.find_first_of(",\n\r") != std::string::npos) {
    schema_error("image_id", "must be non-empty without commas or newlines");
  }
  try {
    record.diagnosis = parse_diagnosis(string_at(require(doc, "diagnosis"), "diagnosis"));
  } catch (const Error& e) {
    throw Error(ErrorKind::Schema, e.what());
  }
  record.has_veil_area = flag_or_false(doc, "has_veil_area");
  record.primary_veil = flag_or_false(doc, "primary_veil");
  record.veil_related = flag_or_false(doc, "veil_related");
  if (record.primary_veil && record.diagnosis != Diagnosis::Melanoma) {
    schema_error("primary_veil", "a primary veil implies diagnosis 'melanoma'");
  }

  const Json& border_json = require(doc, "border");
  if (!border_json.is_array()) schema_error("border", "expected an array of [row, col]");
  std::vector<PointF> border_points;
  for (std::size_t i = 0; i < border_json.size(); ++i) {
    const std::string field = "border[" + std::to_string(i) + "]";
    const PointF p = point_at(border_json[i], field);
    if (size && !point_inside(p, *size)) schema_error(field, "lies outside the image");
    border_points.push_back(p);
  }
  std::optional<ControlPolygon> border;
  try {
    border.emplace(std::move(border_points));
  } catch (const Error& e) {
    throw Error(ErrorKind::Schema, std::string("border: ") + e.what());
  }

  RegionAnnotation regions;
  if (doc.contains("regions")) {
    const Json& list = doc.at("regions");
    if (!list.is_array()) schema_error("regions", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = "regions[" + std::to_string(i) + "]";
      const Json& item = list[i];
      if (!item.is_object()) schema_error(field, "expected an object");
      if (!item.contains("center")) schema_error(field + ".center", "missing required field");
      if (!item.contains("radius")) schema_error(field + ".radius", "missing required field");
      if (!item.contains("label")) schema_error(field + ".label", "missing required field");
      Circle circle;
      const PointF center = point_at(item.at("center"), field + ".center");
      circle.center_row = center.row;
      circle.center_col = center.col;
      circle.radius = number_at(item.at("radius"), field + ".radius");
      const std::string label = string_at(item.at("label"), field + ".label");
      if (label == "veil") {
        circle.label = RegionLabel::Veil;
      } else if (label == "non-veil") {
        circle.label = RegionLabel::NonVeil;
      } else {
        schema_error(field + ".label", "expected 'veil' or 'non-veil', got '" + label + "'");
      }
      if (!(circle.radius >= 1.0)) schema_error(field + ".radius", "must be >= 1");
      if (size && (circle.center_row - circle.radius < 0.0 ||
                   circle.center_col - circle.radius < 0.0 ||
                   circle.center_row + circle.radius > size->height - 1 ||
                   circle.center_col + circle.radius > size->width - 1)) {
        schema_error(field, "circle extends outside the image");
      }
      regions.circles.push_back(circle);
    }
  }

  return Annotation{std::move(*border), std::move(regions), std::move(record), size};
}

Annotation load_annotation(const std::filesystem::path& path,
                           std::optional<ImageSize> expected_size) {
  const std::string text = read_file(path);
  try {
    return parse_annotation(text, expected_size);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string annotation_to_json(const Annotation& annotation) {
  Json doc;
  doc["image_id"] = annotation.record.image_id;
  if (annotation.image_size) {
    doc["width"] = annotation.image_size->width;
    doc["height"] = annotation.image_size->height;
  }
  Json border = Json::array();
  for (const PointF& p : annotation.border.points()) border.push_back({p.row, p.col});
  doc["border"] = std::move(border);
  Json regions = Json::array();
  for (const Circle& c : annotation.regions.circles) {
    Json item;
    item["center"] = {c.center_row, c.center_col};
    item["radius"] = c.radius;
    item["label"] = std::string(to_string(c.label));
    regions.push_back(std::move(item));
  }
  doc["regions"] = std::move(regions);
  doc["diagnosis"] = std::string(to_string(annotation.record.diagnosis));
  doc["has_veil_area"] = annotation.record.has_veil_area;
  doc["primary_veil"] = annotation.record.primary_veil;
  doc["veil_related"] = annotation.record.veil_related;
  return doc.dump(2) + "\n";
}

void save_annotation(const std::filesystem::path& path, const Annotation& annotation) {
  write_file_atomic(path, annotation_to_json(annotation));
}

std::vector<PixelSample> sample_pixels(const std::string& image_id,
                                       const RegionAnnotation& regions, ImageSize size,
                                       int per_class, std::uint64_t seed,
                                       const BinaryMask* domain) {
  if (per_class < 1) throw Error(ErrorKind::InvalidArgument, "per_class must be positive");
  if (domain && domain->size() != size) {
    throw Error(ErrorKind::InvalidArgument, "sampling domain size differs from image size");
  }

  BinaryMask covered[2] = {BinaryMask(size.width, size.height),
                           BinaryMask(size.width, size.height)};
  for (const Circle& c : regions.circles) {
    BinaryMask& target = covered[static_cast<int>(c.label)];
    const int r0 = std::max(0, static_cast<int>(std::floor(c.center_row - c.radius)));
    const int r1 = std::min(size.height - 1, static_cast<int>(std::ceil(c.center_row + c.radius)));
    const int c0 = std::max(0, static_cast<int>(std::floor(c.center_col - c.radius)));
    const int c1 = std::min(size.width - 1, static_cast<int>(std::ceil(c.center_col + c.radius)));
    for (int r = r0; r <= r1; ++r) {
      for (int col = c0; col <= c1; ++col) {
        if (c.contains(r, col)) target.set(r, col);
      }
    }
  }

  Rng rng(seed);
  std::vector<PixelSample> out;
  out.reserve(2 * static_cast<std::size_t>(per_class));
  for (const RegionLabel label : {RegionLabel::NonVeil, RegionLabel::Veil}) {
    const BinaryMask& mine = covered[static_cast<int>(label)];
    const BinaryMask& other = covered[1 - static_cast<int>(label)];
    std::vector<PixelCoord> pool;
    for (int r = 0; r < size.height; ++r) {
      for (int c = 0; c < size.width; ++c) {
        if (mine.test(r, c) && !other.test(r, c) && (!domain || domain->test(r, c))) {
          pool.push_back({r, c});
        }
      }
    }
    if (pool.size() < static_cast<std::size_t>(per_class)) {
      throw Error(ErrorKind::Shortfall,
                  image_id + ": requested " + std::to_string(per_class) + " " +
                      std::string(to_string(label)) + " pixels but only " +
                      std::to_string(pool.size()) + " are available (short by " +
                      std::to_string(per_class - pool.size()) + ")");
    }
    // Partial Fisher-Yates: the first per_class slots become the draw.
    for (std::size_t i = 0; i < static_cast<std::size_t>(per_class); ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(per_class);
    std::sort(pool.begin(), pool.end());
    for (const PixelCoord& p : pool) out.push_back({image_id, p.row, p.col, label, {}});
  }
  return out;
}

}  // namespace dermveil
