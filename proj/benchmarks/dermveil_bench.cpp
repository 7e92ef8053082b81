#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "dermveil/features.hpp"
#include "dermveil/phantom.hpp"
#include "dermveil/raster.hpp"
#include "dermveil/rng.hpp"
#include "dermveil/veil.hpp"

using namespace dermveil;

namespace {

std::vector<std::vector<double>> random_tuples(std::size_t count) {
  Rng rng(1);
  std::vector<std::vector<double>> out(count, std::vector<double>(25));
  for (auto& t : out) {
    for (double& v : t) v = rng.uniform();
  }
  return out;
}

void BM_Median25Network(benchmark::State& state) {
  const auto tuples = random_tuples(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(median25(tuples[i++ & 1023]));
  }
}
BENCHMARK(BM_Median25Network);

void BM_Median25NthElement(benchmark::State& state) {
  const auto tuples = random_tuples(1024);
  std::size_t i = 0;
  std::vector<double> scratch(25);
  for (auto _ : state) {
    const auto& t = tuples[i++ & 1023];
    std::copy(t.begin(), t.end(), scratch.begin());
    std::nth_element(scratch.begin(), scratch.begin() + 12, scratch.end());
    benchmark::DoNotOptimize(scratch[12]);
  }
}
BENCHMARK(BM_Median25NthElement);

void BM_DistanceField(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Rng rng(2);
  BinaryMask mask(side, side);
  for (std::size_t k = 0; k < mask.pixel_count(); ++k) {
    if (rng.uniform() < 0.01) mask.set_index(k);
  }
  for (auto _ : state) benchmark::DoNotOptimize(distance_field(mask));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_DistanceField)->Arg(64)->Arg(256)->Arg(768);

void BM_TextureWindow(benchmark::State& state) {
  Rng rng(3);
  std::vector<int> window(25);
  for (int& q : window) q = static_cast<int>(rng.below(16));
  for (auto _ : state) benchmark::DoNotOptimize(texture_features(window, 5, 16));
}
BENCHMARK(BM_TextureWindow);

DecisionTree two_feature_tree() {
  using Node = DecisionTree::Node;
  std::vector<Node> nodes(5);
  nodes[0] = Node{2, 0.36, 1, 2, 0, {}};
  nodes[1] = Node{-1, 0, -1, -1, 0, {}};
  nodes[2] = Node{9, -40, 3, 4, 0, {}};
  nodes[3] = Node{-1, 0, -1, -1, 1, {}};
  nodes[4] = Node{-1, 0, -1, -1, 0, {}};
  return DecisionTree(18, {"non-veil", "veil"}, nodes);
}

void BM_DetectVeil(benchmark::State& state) {
  PhantomSpec spec;
  spec.width = 768;
  spec.height = 512;
  spec.semi_major = 220;
  spec.semi_minor = 160;
  spec.veil_fraction = 0.15;
  const Phantom p = generate_phantom(spec, 5);
  const DecisionTree tree = two_feature_tree();
  DetectionOptions options;
  options.lazy = state.range(0) != 0;
  for (auto _ : state) {
    const SkinColor skin = background_skin_color(p.image, p.lesion);
    benchmark::DoNotOptimize(detect_veil(p.image, p.lesion, skin, tree, options));
  }
}
BENCHMARK(BM_DetectVeil)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
