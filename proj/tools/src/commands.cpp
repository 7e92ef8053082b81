#include "dermveil_app/commands.hpp"

#include <map>

#include "dermveil/csv.hpp"
#include "dermveil/error.hpp"
#include "dermveil/image_io.hpp"
#include "dermveil/raster.hpp"
#include "dermveil/rng.hpp"

namespace dermveil::app {
namespace {

const std::vector<std::string> kPixelClasses = {"non-veil", "veil"};
const std::vector<std::string> kLesionClasses = {"benign", "melanoma"};

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct LoadedCase {
  RgbImage image;
  Annotation annotation;
  BinaryMask lesion;
};

LoadedCase load_case(const path& image_path, const path& annotation_path) {
  RgbImage image = read_image(image_path);
  Annotation annotation = load_annotation(annotation_path, image.size());
  BinaryMask lesion = border_mask(annotation.border, image.width(), image.height());
  return {std::move(image), std::move(annotation), std::move(lesion)};
}

SkinColor skin_of(const LoadedCase& c, const PipelineConfig& config) {
  return background_skin_color(c.image, c.lesion, config.ring_skip, config.ring_take);
}

bool has_label(const RegionAnnotation& regions, RegionLabel label) {
  for (const Circle& c : regions.circles) {
    if (c.label == label) return true;
  }
  return false;
}

DecisionTree train(std::vector<LabeledRow> rows, const PipelineConfig& config,
                   const std::vector<std::string>& classes, int feature_count,
                   const path& out_tree) {
  if (rows.empty()) throw Error(ErrorKind::Schema, "training CSV has no rows");
  DecisionTree tree = induce(rows, config.induction(), classes);
  if (tree.feature_count() != feature_count) {
    throw Error(ErrorKind::Schema, "training rows have the wrong width");
  }
  write_file_atomic(out_tree, tree_to_json(tree));
  return tree;
}

}  // namespace

BinaryMask cmd_mask(const MaskArgs& args) {
  std::optional<ImageSize> size;
  if (args.image) size = read_image(*args.image).size();
  const Annotation annotation = load_annotation(args.annotation, size);
  if (!annotation.image_size) {
    throw Error(ErrorKind::InvalidArgument,
                "annotation has no width/height; pass the image to size the mask");
  }
  const ImageSize s = *annotation.image_size;
  BinaryMask mask(1, 1);
  if (args.linear) {
    std::vector<PointF> loop(annotation.border.points().begin(),
                             annotation.border.points().end());
    loop.push_back(loop.front());
    mask = rasterize_filled(loop, s.width, s.height);
  } else {
    mask = border_mask(annotation.border, s.width, s.height);
  }
  write_mask(args.out, mask);
  return mask;
}

ExtractSummary cmd_extract(const path& manifest_path, Split split, const PipelineConfig& config,
                           const path& out_csv) {
  config.validate();
  const DatasetManifest manifest = load_manifest(manifest_path);
  std::vector<std::string> header = {"image_id", "row", "col", "label"};
  for (int k = 1; k <= kFeatureCount; ++k) header.push_back("F" + std::to_string(k));
  std::string out = join_csv_row(header);

  ExtractSummary summary;
  for (const ManifestEntry& entry : manifest.select(split)) {
    const LoadedCase c = load_case(entry.image_path, entry.annotation_path);
    const RegionAnnotation& regions = c.annotation.regions;
    if (!has_label(regions, RegionLabel::Veil) || !has_label(regions, RegionLabel::NonVeil)) {
      summary.skipped.push_back(entry.image_id);
      continue;
    }
    const std::vector<PixelSample> samples =
        sample_pixels(entry.image_id, regions, c.image.size(), config.per_class,
                      derive_seed(config.seed, fnv1a(entry.image_id)), &c.lesion);
    const FeaturePlanes planes =
        extract_feature_planes(c.image, c.lesion, skin_of(c, config), config.features());
    for (const PixelSample& s : samples) {
      std::vector<std::string> cells = {s.image_id, std::to_string(s.row), std::to_string(s.col),
                                        std::string(to_string(s.label))};
      for (const double v : planes.vector_at(s.row, s.col)) cells.push_back(format_number(v));
      out += join_csv_row(cells);
      ++summary.rows;
    }
    summary.used.push_back(entry.image_id);
  }
  write_file_atomic(out_csv, out);
  return summary;
}

std::vector<LabeledRow> load_pixel_rows(const path& csv) {
  const CsvTable table = parse_csv(read_file(csv), csv.string());
  const std::size_t label_col = table.column("label");
  std::vector<std::size_t> cols;
  for (int k = 1; k <= kFeatureCount; ++k) cols.push_back(table.column("F" + std::to_string(k)));
  std::vector<LabeledRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    const std::string where = csv.string() + " row " + std::to_string(i + 1);
    LabeledRow row;
    try {
      row.label = static_cast<int>(parse_region_label(cells[label_col]));
    } catch (const Error& e) {
      throw Error(ErrorKind::Schema, where + ": " + e.what());
    }
    for (const std::size_t c : cols) row.features.push_back(parse_number(cells[c], where));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LabeledRow> load_lesion_rows(const path& csv) {
  const CsvTable table = parse_csv(read_file(csv), csv.string());
  std::size_t label_col;
  try {
    label_col = table.column("label");
  } catch (const Error&) {
    label_col = table.column("actual");
  }
  const std::size_t cols[3] = {table.column("S1"), table.column("S2"), table.column("S3")};
  std::vector<LabeledRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    const std::string where = csv.string() + " row " + std::to_string(i + 1);
    LabeledRow row;
    try {
      row.label = static_cast<int>(parse_diagnosis(cells[label_col]));
    } catch (const Error& e) {
      throw Error(ErrorKind::Schema, where + ": " + e.what());
    }
    for (const std::size_t c : cols) row.features.push_back(parse_number(cells[c], where));
    rows.push_back(std::move(row));
  }
  return rows;
}

DecisionTree cmd_train_pixel(const path& csv, const PipelineConfig& config, const path& out_tree) {
  config.validate();
  return train(load_pixel_rows(csv), config, kPixelClasses, kFeatureCount, out_tree);
}

DecisionTree cmd_train_lesion(const path& csv, const PipelineConfig& config,
                              const path& out_tree) {
  config.validate();
  return train(load_lesion_rows(csv), config, kLesionClasses, 3, out_tree);
}

VeilDetection cmd_detect(const DetectArgs& args, const PipelineConfig& config) {
  config.validate();
  const LoadedCase c = load_case(args.image, args.annotation);
  const DecisionTree tree = tree_from_json(read_file(args.tree));
  const SkinColor skin = skin_of(c, config);
  VeilDetection detection = detect_veil(c.image, c.lesion, skin, tree, config.detection());
  write_mask(args.out_mask, detection.mask.refined);
  if (args.out_overlay) {
    write_image(*args.out_overlay, render_overlay(c.image, c.lesion, detection.mask.refined));
  }
  if (args.dump_planes) {
    std::filesystem::create_directories(*args.dump_planes);
    const FeaturePlanes planes = extract_feature_planes(c.image, c.lesion, skin,
                                                        config.features(), detection.planes_used);
    for (int k = 0; k < kFeatureCount; ++k) {
      if (!planes.has(k)) continue;
      write_feature_plane(*args.dump_planes / ("F" + std::to_string(k + 1) + ".dvplane"), planes,
                          k);
    }
  }
  return detection;
}

std::vector<ClassifiedLesion> cmd_classify(const path& manifest_path, Split split,
                                           const path& pixel_tree,
                                           const std::string& lesion_model,
                                           const PipelineConfig& config, const path& out_csv) {
  config.validate();
  const DatasetManifest manifest = load_manifest(manifest_path);
  const DecisionTree tree = tree_from_json(read_file(pixel_tree));
  const DecisionTree model =
      lesion_model == "reference" ? reference_lesion_model() : tree_from_json(read_file(lesion_model));

  std::string out = join_csv_row({"image_id", "S1", "S2", "S3", "predicted", "actual"});
  std::vector<ClassifiedLesion> results;
  for (const ManifestEntry& entry : manifest.select(split)) {
    const LoadedCase c = load_case(entry.image_path, entry.annotation_path);
    const VeilDetection detection =
        detect_veil(c.image, c.lesion, skin_of(c, config), tree, config.detection());
    ClassifiedLesion r;
    r.image_id = entry.image_id;
    r.features = shape_features(detection.mask.refined, c.lesion);
    r.predicted = classify_lesion(r.features, model);
    r.actual = c.annotation.record.diagnosis;
    out += join_csv_row({r.image_id, format_number(r.features.s1), format_number(r.features.s2),
                         format_number(r.features.s3), std::string(to_string(r.predicted)),
                         std::string(to_string(r.actual))});
    results.push_back(std::move(r));
  }
  write_file_atomic(out_csv, out);
  return results;
}

Subset parse_subset(std::string_view text) {
  if (text == "all") return Subset::All;
  if (text == "veil") return Subset::Veil;
  if (text == "primary-veil") return Subset::PrimaryVeil;
  if (text == "veil-related") return Subset::VeilRelated;
  throw Error(ErrorKind::InvalidArgument,
              "subset: expected all, veil, primary-veil or veil-related, got '" +
                  std::string(text) + "'");
}

MetricsReport cmd_evaluate(const path& manifest_path, const path& predictions, Split split,
                           Subset subset, const std::optional<path>& out_json) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const CsvTable table = parse_csv(read_file(predictions), predictions.string());
  const std::size_t id_col = table.column("image_id");
  const std::size_t pred_col = table.column("predicted");
  std::map<std::string, Diagnosis> predicted;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    const std::string where = predictions.string() + " row " + std::to_string(i + 1);
    Diagnosis d;
    try {
      d = parse_diagnosis(cells[pred_col]);
    } catch (const Error& e) {
      throw Error(ErrorKind::Schema, where + ": " + e.what());
    }
    if (!predicted.emplace(cells[id_col], d).second) {
      throw Error(ErrorKind::Schema, where + ": duplicate image_id '" + cells[id_col] + "'");
    }
  }

  std::vector<int> pred, actual;
  for (const ManifestEntry& entry : manifest.select(split)) {
    const LesionRecord record = load_annotation(entry.annotation_path).record;
    const bool keep = subset == Subset::All ||
                      (subset == Subset::Veil && record.has_veil_area) ||
                      (subset == Subset::PrimaryVeil && record.primary_veil) ||
                      (subset == Subset::VeilRelated && record.veil_related);
    if (!keep) continue;
    const auto it = predicted.find(record.image_id);
    if (it == predicted.end()) {
      throw Error(ErrorKind::Schema, predictions.string() + ": no prediction for image_id '" +
                                         record.image_id + "'");
    }
    pred.push_back(static_cast<int>(it->second));
    actual.push_back(static_cast<int>(record.diagnosis));
  }
  const MetricsReport report =
      pred.empty() ? metrics_from_counts(0, 0, 0, 0)
                   : confusion(pred, actual, static_cast<int>(Diagnosis::Melanoma));
  if (out_json) write_file_atomic(*out_json, metrics_to_json(report) + "\n");
  return report;
}

Phantom cmd_phantom(const PhantomSpec& spec, std::uint64_t seed, const PhantomOutputs& out) {
  Phantom phantom = generate_phantom(spec, seed);
  write_image(out.image, phantom.image);
  save_annotation(out.annotation, phantom.annotation);
  write_mask(out.truth, phantom.veil);
  if (out.lesion) write_mask(*out.lesion, phantom.lesion);
  return phantom;
}

}  // namespace dermveil::app
