#include "dermveil_app/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <ostream>

#include "dermveil/csv.hpp"
#include "dermveil/error.hpp"
#include "dermveil_app/commands.hpp"

namespace dermveil::app {
namespace {

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

std::string feature_list(const DecisionTree& tree, const char* prefix) {
  std::string s;
  for (const int k : tree.features_used()) {
    if (!s.empty()) s += ' ';
    s += prefix + std::to_string(k + 1);
  }
  return s.empty() ? "none" : s;
}

struct Globals {
  std::string profile = "default";
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

// Overrides shared by the training verbs.
struct TrainFlags {
  std::optional<double> confidence;
  std::optional<int> min_leaf;
  std::optional<int> max_depth;
  int cv_folds = 0;
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags) {
  cmd->add_option("--confidence", flags.confidence, "Pruning confidence factor C");
  cmd->add_option("--min-leaf", flags.min_leaf, "Minimum rows per leaf (M)");
  cmd->add_option("--max-depth", flags.max_depth, "Maximum tree depth");
  cmd->add_option("--cv", flags.cv_folds, "Also print stratified k-fold cross-validation")
      ->check(CLI::Range(2, 1000));
}

void apply_train_flags(PipelineConfig& config, const TrainFlags& flags) {
  if (flags.confidence) config.confidence = *flags.confidence;
  if (flags.min_leaf) config.min_leaf = *flags.min_leaf;
  if (flags.max_depth) config.max_depth = *flags.max_depth;
}

void report_tree(std::ostream& out, const DecisionTree& tree, const char* prefix) {
  out << "features: " << feature_list(tree, prefix) << "\n"
      << "nodes=" << tree.node_count() << " leaves=" << tree.leaf_count()
      << " depth=" << tree.depth() << "\n";
}

void report_cv(std::ostream& out, const std::vector<LabeledRow>& rows, int k,
               const PipelineConfig& config, const std::vector<std::string>& classes) {
  if (k == 0) return;
  out << cross_validation_to_json(cross_validate(rows, k, config.induction(), classes, 1))
      << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blue-white veil detection and lesion classification", "dermveil"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  app.add_option("--profile", globals.profile, "Parameter profile")
      ->check(CLI::IsMember({"default", "compact"}));
  app.add_option("--config", globals.config_path, "key = value overrides");
  app.add_option("--seed", globals.seed, "RNG seed");

  // mask
  MaskArgs mask_args;
  std::string mask_image;
  auto* mask = app.add_subcommand("mask", "Rasterize an annotation border into a lesion mask");
  mask->add_option("--annotation", mask_args.annotation)->required();
  mask->add_option("--out", mask_args.out)->required();
  mask->add_option("--image", mask_image, "Image supplying the mask size");
  mask->add_flag("--linear", mask_args.linear, "Join control points with straight lines");

  // extract
  std::string manifest, split = "all", out_path;
  int per_class = 0;
  auto* extract = app.add_subcommand("extract", "Sample annotated pixels into a feature CSV");
  extract->add_option("--manifest", manifest)->required();
  extract->add_option("--out", out_path)->required();
  extract->add_option("--split", split)->check(CLI::IsMember({"train", "test", "all"}));
  extract->add_option("--per-class", per_class, "Pixels drawn per class and image");

  // train-pixel / train-lesion
  std::string csv_path;
  TrainFlags pixel_flags, lesion_flags;
  auto* train_pixel = app.add_subcommand("train-pixel", "Induce a pixel (veil) tree");
  train_pixel->add_option("--csv", csv_path)->required();
  train_pixel->add_option("--out", out_path)->required();
  add_train_flags(train_pixel, pixel_flags);
  auto* train_lesion = app.add_subcommand("train-lesion", "Induce a lesion tree over S1..S3");
  train_lesion->add_option("--csv", csv_path)->required();
  train_lesion->add_option("--out", out_path)->required();
  add_train_flags(train_lesion, lesion_flags);

  // detect
  DetectArgs detect_args;
  std::string overlay, dump_dir;
  auto* detect = app.add_subcommand("detect", "Detect the veil region of one image");
  detect->add_option("--image", detect_args.image)->required();
  detect->add_option("--annotation", detect_args.annotation)->required();
  detect->add_option("--tree", detect_args.tree)->required();
  detect->add_option("--out", detect_args.out_mask)->required();
  detect->add_option("--overlay", overlay, "Overlay image output");
  detect->add_option("--dump-planes", dump_dir, "Directory for the tested feature planes");

  // classify
  std::string pixel_tree, lesion_model = "reference";
  auto* classify = app.add_subcommand("classify", "Lesion features and diagnosis per image");
  classify->add_option("--manifest", manifest)->required();
  classify->add_option("--pixel-tree", pixel_tree)->required();
  classify->add_option("--lesion-model", lesion_model, "'reference' or a lesion tree path");
  classify->add_option("--out", out_path)->required();
  classify->add_option("--split", split)->check(CLI::IsMember({"train", "test", "all"}));

  // evaluate
  std::string predictions, subset = "all";
  auto* evaluate = app.add_subcommand("evaluate", "Lesion-level metrics of a predictions CSV");
  evaluate->add_option("--manifest", manifest)->required();
  evaluate->add_option("--predictions", predictions)->required();
  evaluate->add_option("--subset", subset)
      ->check(CLI::IsMember({"all", "veil", "primary-veil", "veil-related"}));
  evaluate->add_option("--split", split)->check(CLI::IsMember({"train", "test", "all"}));
  evaluate->add_option("--out", out_path, "Report JSON output");

  // phantom
  PhantomSpec spec;
  PhantomOutputs phantom_out;
  std::string shape = "ellipse", diagnosis = "benign", lesion_out;
  auto* phantom = app.add_subcommand("phantom", "Generate a synthetic image with ground truth");
  phantom->add_option("--out-image", phantom_out.image)->required();
  phantom->add_option("--out-annotation", phantom_out.annotation)->required();
  phantom->add_option("--out-truth", phantom_out.truth, "Veil ground-truth mask")->required();
  phantom->add_option("--out-lesion", lesion_out, "Lesion ground-truth mask");
  phantom->add_option("--image-id", spec.image_id);
  phantom->add_option("--width", spec.width);
  phantom->add_option("--height", spec.height);
  phantom->add_option("--shape", shape)->check(CLI::IsMember({"disk", "ellipse", "irregular"}));
  phantom->add_option("--semi-major", spec.semi_major);
  phantom->add_option("--semi-minor", spec.semi_minor);
  phantom->add_option("--veil-fraction", spec.veil_fraction);
  phantom->add_option("--noise", spec.noise_sigma, "Gaussian noise sigma per channel");
  phantom->add_option("--diagnosis", diagnosis)->check(CLI::IsMember({"benign", "melanoma"}));

  std::vector<const char*> argv = {"dermveil"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: invalid-argument: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    PipelineConfig config = PipelineConfig::profile(globals.profile);
    if (!globals.config_path.empty()) apply_config_file(config, globals.config_path);
    if (globals.seed) config.seed = *globals.seed;

    if (mask->parsed()) {
      if (!mask_image.empty()) mask_args.image = mask_image;
      const BinaryMask lesion = cmd_mask(mask_args);
      out << "lesion_pixels=" << lesion.count() << "\n";
    } else if (extract->parsed()) {
      if (per_class > 0) config.per_class = per_class;
      const ExtractSummary s = cmd_extract(manifest, parse_split(split), config, out_path);
      for (const std::string& id : s.skipped) {
        err << "note: " << id << " lacks veil or non-veil circles; skipped\n";
      }
      out << "rows=" << s.rows << " images=" << s.used.size() << " skipped=" << s.skipped.size()
          << "\n";
    } else if (train_pixel->parsed()) {
      apply_train_flags(config, pixel_flags);
      const DecisionTree tree = cmd_train_pixel(csv_path, config, out_path);
      report_tree(out, tree, "F");
      if (pixel_flags.cv_folds > 0) {
        report_cv(out, load_pixel_rows(csv_path), pixel_flags.cv_folds, config,
                  tree.class_names());
      }
    } else if (train_lesion->parsed()) {
      apply_train_flags(config, lesion_flags);
      const DecisionTree tree = cmd_train_lesion(csv_path, config, out_path);
      report_tree(out, tree, "S");
      if (lesion_flags.cv_folds > 0) {
        report_cv(out, load_lesion_rows(csv_path), lesion_flags.cv_folds, config,
                  tree.class_names());
      }
    } else if (detect->parsed()) {
      if (!overlay.empty()) detect_args.out_overlay = overlay;
      if (!dump_dir.empty()) detect_args.dump_planes = dump_dir;
      const VeilDetection d = cmd_detect(detect_args, config);
      std::string planes;
      for (int k = 0; k < kFeatureCount; ++k) {
        if (!d.planes_used.test(k)) continue;
        if (!planes.empty()) planes += ' ';
        planes += "F" + std::to_string(k + 1);
      }
      out << "veil_pixels=" << d.mask.refined.count() << " texture_windows="
          << d.stats.texture_windows << " planes=" << (planes.empty() ? "none" : planes) << "\n";
    } else if (classify->parsed()) {
      const auto results =
          cmd_classify(manifest, parse_split(split), pixel_tree, lesion_model, config, out_path);
      out << "images=" << results.size() << "\n";
    } else if (evaluate->parsed()) {
      std::optional<std::filesystem::path> report_path;
      if (!out_path.empty()) report_path = out_path;
      const MetricsReport report =
          cmd_evaluate(manifest, predictions, parse_split(split), parse_subset(subset), report_path);
      out << metrics_to_json(report) << "\n";
    } else if (phantom->parsed()) {
      spec.shape = parse_phantom_shape(shape);
      spec.diagnosis = parse_diagnosis(diagnosis);
      if (!lesion_out.empty()) phantom_out.lesion = lesion_out;
      const Phantom p = cmd_phantom(spec, config.seed, phantom_out);
      out << "lesion_pixels=" << p.lesion.count() << " veil_pixels=" << p.veil.count() << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: io: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dermveil::app
