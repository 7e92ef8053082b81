#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dermveil/dtree.hpp"
#include "dermveil/lesion.hpp"
#include "dermveil/metrics.hpp"
#include "dermveil/phantom.hpp"
#include "dermveil/veil.hpp"
#include "dermveil_app/config.hpp"
#include "dermveil_app/manifest.hpp"

namespace dermveil::app {

using std::filesystem::path;

// Every command writes its outputs atomically and returns what it wrote.

struct MaskArgs {
  path annotation;
  path out;
  std::optional<path> image;  // size source when the annotation has none
  bool linear = false;        // rasterize the control polygon itself, no spline
};
BinaryMask cmd_mask(const MaskArgs& args);

struct ExtractSummary {
  std::size_t rows = 0;
  std::vector<std::string> used;     // image ids contributing samples
  std::vector<std::string> skipped;  // image ids lacking one of the classes
};
/// Feature CSV: image_id,row,col,label,F1..F18.
ExtractSummary cmd_extract(const path& manifest, Split split, const PipelineConfig& config,
                           const path& out_csv);

/// Training rows from a feature CSV; label 1 is veil.
std::vector<LabeledRow> load_pixel_rows(const path& csv);
/// Training rows from a CSV with S1,S2,S3 and a "label" (or "actual")
/// column; label 1 is melanoma.
std::vector<LabeledRow> load_lesion_rows(const path& csv);

DecisionTree cmd_train_pixel(const path& csv, const PipelineConfig& config, const path& out_tree);
DecisionTree cmd_train_lesion(const path& csv, const PipelineConfig& config, const path& out_tree);

struct DetectArgs {
  path image;
  path annotation;
  path tree;
  path out_mask;
  std::optional<path> out_overlay;
  std::optional<path> dump_planes;  // directory for F<k>.dvplane files
};
VeilDetection cmd_detect(const DetectArgs& args, const PipelineConfig& config);

struct ClassifiedLesion {
  std::string image_id;
  LesionShapeFeatures features;
  Diagnosis predicted = Diagnosis::Benign;
  Diagnosis actual = Diagnosis::Benign;
};
/// `lesion_model` is "reference" or the path of a lesion tree. Output CSV:
/// image_id,S1,S2,S3,predicted,actual.
std::vector<ClassifiedLesion> cmd_classify(const path& manifest, Split split,
                                           const path& pixel_tree,
                                           const std::string& lesion_model,
                                           const PipelineConfig& config, const path& out_csv);

enum class Subset { All, Veil, PrimaryVeil, VeilRelated };
Subset parse_subset(std::string_view text);

/// Lesion-level metrics (melanoma positive) of a predictions CSV with
/// image_id and predicted columns, against the manifest diagnoses. Every
/// selected manifest image needs a prediction.
MetricsReport cmd_evaluate(const path& manifest, const path& predictions, Split split,
                           Subset subset, const std::optional<path>& out_json);

struct PhantomOutputs {
  path image;
  path annotation;
  path truth;  // veil mask
  std::optional<path> lesion;
};
Phantom cmd_phantom(const PhantomSpec& spec, std::uint64_t seed, const PhantomOutputs& out);

}  // namespace dermveil::app
