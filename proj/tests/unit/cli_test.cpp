#include <gtest/gtest.h>

#include <sstream>

#include "dermveil/csv.hpp"
#include "dermveil/image_io.hpp"
#include "dermveil/error.hpp"
#include "dermveil_app/cli.hpp"
#include "dermveil_app/config.hpp"
#include "oracles.hpp"

using namespace dermveil;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = app::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Writes phantom <id> into dir and returns the manifest line.
std::string add_phantom(const fs::path& dir, const std::string& id, std::uint64_t seed,
                        const std::string& shape, double fraction,
                        const std::string& diagnosis, const std::string& split) {
  const CliRun r = run({"--seed", std::to_string(seed), "phantom",
                     "--out-image", (dir / (id + ".png")).string(),
                     "--out-annotation", (dir / (id + ".json")).string(),
                     "--out-truth", (dir / (id + "_veil.png")).string(),
                     "--image-id", id, "--shape", shape,
                     "--veil-fraction", std::to_string(fraction), "--diagnosis", diagnosis});
  EXPECT_EQ(r.code, 0) << r.err;
  return id + ".png," + id + ".json," + split + "\n";
}

std::vector<std::string> column(const CsvTable& t, const std::string& name) {
  std::vector<std::string> out;
  const std::size_t k = t.column(name);
  for (const auto& row : t.rows) out.push_back(row[k]);
  return out;
}

CsvTable load(const fs::path& p) { return parse_csv(read_file(p), p.string()); }

}  // namespace

TEST(Cli, LinearSquareMask) {
  const fs::path dir = oracle::scratch_dir("cli_square");
  write_file_atomic(dir / "a.json",
                    R"({"image_id":"sq","width":20,"height":20,"diagnosis":"benign",)"
                    R"("border":[[5,5],[5,15],[15,15],[15,5]]})");
  const CliRun r = run({"mask", "--annotation", (dir / "a.json").string(), "--out",
                     (dir / "m.png").string(), "--linear"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "lesion_pixels=121\n");
  EXPECT_EQ(read_mask(dir / "m.png").count(), 121u);
}

TEST(Cli, CollinearBorderFailsCleanly) {
  const fs::path dir = oracle::scratch_dir("cli_collinear");
  write_file_atomic(dir / "a.json",
                    R"({"image_id":"line","width":20,"height":20,"diagnosis":"benign",)"
                    R"("border":[[2,2],[5,5],[9,9]]})");
  const CliRun r = run({"mask", "--annotation", (dir / "a.json").string(), "--out",
                     (dir / "m.png").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_FALSE(fs::exists(dir / "m.png"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"mask"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--profile", "fast", "mask", "--annotation", "a", "--out", "b"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ExtractTrainDetectClassifyEvaluate) {
  const fs::path dir = oracle::scratch_dir("cli_pipeline");
  std::string manifest = "image_path,annotation_path,split\n";
  for (int i = 0; i < 4; ++i) {
    manifest += add_phantom(dir, "tr" + std::to_string(i), 100 + i, "ellipse", 0.15, "benign",
                            "train");
  }
  manifest += add_phantom(dir, "tiny", 200, "ellipse", 0.005, "benign", "test");
  manifest += add_phantom(dir, "round", 201, "ellipse", 0.05, "benign", "test");
  manifest += add_phantom(dir, "ragged", 202, "irregular", 0.05, "melanoma", "test");
  manifest += add_phantom(dir, "clear", 203, "disk", 0.0, "benign", "test");
  write_file_atomic(dir / "manifest.csv", manifest);
  const std::string m = (dir / "manifest.csv").string();

  // extract: 2 x per_class rows per image with both circle kinds.
  CliRun r = run({"extract", "--manifest", m, "--split", "train", "--per-class", "50", "--out",
               (dir / "px.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "rows=400 images=4 skipped=0\n");
  const std::string first = read_file(dir / "px.csv");
  ASSERT_EQ(run({"extract", "--manifest", m, "--split", "train", "--per-class", "50", "--out",
                 (dir / "px.csv").string()})
                .code,
            0);
  EXPECT_EQ(read_file(dir / "px.csv"), first);

  const CsvTable px = load(dir / "px.csv");
  ASSERT_EQ(px.rows.size(), 400u);
  ASSERT_EQ(px.header.size(), 22u);
  double f1 = 0, f2 = 0, f3 = 0;
  for (const auto& row : px.rows) {
    f1 += parse_number(row[px.column("F1")], "F1");
    f2 += parse_number(row[px.column("F2")], "F2");
    f3 += parse_number(row[px.column("F3")], "F3");
  }
  // Each plane is median-filtered on its own, so the sum is 1 only up to
  // the smoothing.
  EXPECT_NEAR((f1 + f2 + f3) / 400.0, 1.0, 1e-3);

  r = run({"extract", "--manifest", m, "--split", "test", "--per-class", "20", "--out",
           (dir / "px_test.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "rows=120 images=3 skipped=1\n");
  EXPECT_NE(r.err.find("clear"), std::string::npos);

  // train-pixel with the small-tree parameters.
  r = run({"train-pixel", "--csv", (dir / "px.csv").string(), "--out",
           (dir / "tree.json").string(), "--confidence", "0.1", "--min-leaf", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("features: F", 0), 0u) << r.out;
  const DecisionTree learned = tree_from_json(read_file(dir / "tree.json"));
  for (const auto& n : learned.nodes()) {
    if (n.is_leaf()) {
      std::size_t total = 0;
      for (auto c : n.counts) total += c;
      EXPECT_GE(total, 100u);
    }
  }

  // detect with the learned tree.
  r = run({"detect", "--image", (dir / "tr0.png").string(), "--annotation",
           (dir / "tr0.json").string(), "--tree", (dir / "tree.json").string(), "--out",
           (dir / "tr0_det.png").string(), "--overlay", (dir / "tr0_ov.png").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const BinaryMask truth = read_mask(dir / "tr0_veil.png");
  const BinaryMask found = read_mask(dir / "tr0_det.png");
  EXPECT_GE(static_cast<double>((truth & found).count()) / (truth | found).count(), 0.9);

  // classify with a fixed color tree and the reference lesion model.
  write_file_atomic(dir / "blue.json", tree_to_json(oracle::blue_veil_tree()));
  r = run({"classify", "--manifest", m, "--split", "test", "--pixel-tree",
           (dir / "blue.json").string(), "--out", (dir / "pred.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "images=4\n");
  const CsvTable pred = load(dir / "pred.csv");
  const auto ids = column(pred, "image_id");
  const auto predicted = column(pred, "predicted");
  const auto s1 = column(pred, "S1");
  const std::vector<std::string> want_ids = {"tiny", "round", "ragged", "clear"};
  EXPECT_EQ(ids, want_ids);
  EXPECT_EQ(predicted, (std::vector<std::string>{"benign", "benign", "melanoma", "benign"}));
  EXPECT_LT(parse_number(s1[0], "S1"), 0.009);
  EXPECT_NEAR(parse_number(s1[1], "S1"), 0.05, 0.01);
  EXPECT_EQ(parse_number(s1[3], "S1"), 0.0);

  r = run({"evaluate", "--manifest", m, "--split", "test", "--predictions",
           (dir / "pred.csv").string(), "--out",
           (dir / "report.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"tp\": 1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"tn\": 3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"accuracy\": 1"), std::string::npos) << r.out;

  // Inverting every prediction zeroes all three rates.
  std::string inverted = "image_id,predicted\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    inverted += ids[i] + "," + (predicted[i] == "benign" ? "melanoma" : "benign") + "\n";
  }
  write_file_atomic(dir / "inv.csv", inverted);
  r = run({"evaluate", "--manifest", m, "--split", "test", "--predictions",
           (dir / "inv.csv").string(), "--subset",
           "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"sensitivity\": 0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"specificity\": 0"), std::string::npos) << r.out;
}

TEST(Cli, PureCsvGivesSingleLeaf) {
  const fs::path dir = oracle::scratch_dir("cli_pure");
  std::string csv = "image_id,S1,S2,S3,label\n";
  for (int i = 0; i < 10; ++i) {
    csv += "x" + std::to_string(i) + ",0." + std::to_string(i) + ",3,0.9,benign\n";
  }
  write_file_atomic(dir / "l.csv", csv);
  const CliRun r =
      run({"train-lesion", "--csv", (dir / "l.csv").string(), "--out", (dir / "t.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("nodes=1 leaves=1 depth=0"), std::string::npos) << r.out;
}

TEST(Cli, PhantomIsReproducible) {
  const fs::path dir = oracle::scratch_dir("cli_phantom");
  auto gen = [&](const std::string& tag) {
    return run({"--seed", "9", "phantom", "--out-image", (dir / (tag + ".png")).string(),
                "--out-annotation", (dir / (tag + ".json")).string(), "--out-truth",
                (dir / (tag + "_t.png")).string(), "--out-lesion",
                (dir / (tag + "_l.png")).string(), "--shape", "irregular", "--veil-fraction",
                "0.1"});
  };
  const CliRun a = gen("a");
  const CliRun b = gen("b");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  for (const std::string suffix : {".png", ".json", "_t.png", "_l.png"}) {
    EXPECT_EQ(read_file(dir / ("a" + suffix)), read_file(dir / ("b" + suffix))) << suffix;
  }
}

TEST(Config, ProfilesAndOverrides) {
  const app::PipelineConfig compact = app::PipelineConfig::profile("compact");
  EXPECT_EQ(compact.confidence, 0.1);
  EXPECT_EQ(compact.min_leaf, 100);
  EXPECT_EQ(app::PipelineConfig::profile("default").min_leaf, 2);
  EXPECT_THROW(app::PipelineConfig::profile("fast"), Error);

  app::PipelineConfig c;
  app::apply_config_text(c, "# comment\n\nwindow = 7\nmax_depth = 4\nseed=12\n", "t.cfg");
  EXPECT_EQ(c.window, 7);
  EXPECT_EQ(c.max_depth, 4);
  EXPECT_EQ(c.seed, 12u);
  app::apply_config_text(c, "max_depth = none\n", "t.cfg");
  EXPECT_FALSE(c.max_depth);

  try {
    app::apply_config_text(c, "window = 5\nwindow = 4\n", "t.cfg");
    FAIL() << "even window accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("t.cfg:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(app::apply_config_text(c, "colour = 3\n", "t.cfg"), Error);
  EXPECT_THROW(app::apply_config_text(c, "confidence = 0\n", "t.cfg"), Error);
}
