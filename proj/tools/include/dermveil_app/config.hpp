#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "dermveil/dtree.hpp"
#include "dermveil/features.hpp"
#include "dermveil/veil.hpp"

namespace dermveil::app {

struct PipelineConfig {
  double ring_skip = 0.10;
  double ring_take = 0.20;
  int glcm_levels = 16;
  int window = 5;
  int majority_window = 5;
  double confidence = 0.25;
  int min_leaf = 2;
  std::optional<int> max_depth;
  int per_class = 100;
  std::uint64_t seed = 0;

  static PipelineConfig defaults() { return {}; }
  /// confidence 0.1, min_leaf 100.
  static PipelineConfig compact();
  static PipelineConfig profile(std::string_view name);

  /// Sets one key; throws InvalidArgument for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  /// Throws InvalidArgument when a constraint is violated.
  void validate() const;

  FeatureConfig features() const { return {window, glcm_levels}; }
  DetectionOptions detection() const { return {features(), majority_window, true}; }
  InductionConfig induction() const;
};

/// Applies "key = value" lines on top of `config`. Blank lines and lines
/// starting with '#' are ignored.
void apply_config_text(PipelineConfig& config, std::string_view text, std::string_view source);
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

}  // namespace dermveil::app
