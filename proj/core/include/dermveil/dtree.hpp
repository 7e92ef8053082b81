#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dermveil/metrics.hpp"

namespace dermveil {

struct LabeledRow {
  std::vector<double> features;
  int label = 0;
};

struct InductionConfig {
  double confidence = 0.25;  // C, in (0, 1]; smaller prunes harder
  int min_leaf = 2;          // M
  std::optional<int> max_depth;
  std::uint64_t seed = 0;    // fold assignment in cross-validation
  bool prune = true;
};

/// C = 0.1, M = 100: the profile used to keep pixel trees small.
InductionConfig compact_induction_profile();

/// Binary tree over real-valued features. Internal nodes send rows with
/// `feature <= threshold` left. Nodes are stored in preorder, root first.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // zero-based; -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;                    // leaf class, majority class for internal nodes
    std::vector<std::size_t> counts;  // training rows per class; may be empty

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  DecisionTree(int feature_count, std::vector<std::string> class_names,
               std::vector<Node> nodes);

  /// Single-leaf tree that always answers `label`.
  static DecisionTree constant(int feature_count, std::vector<std::string> class_names,
                               int label);

  int predict(std::span<const double> features) const;

  int feature_count() const noexcept { return feature_count_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  std::optional<int> class_index(std::string_view name) const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  /// Sorted zero-based feature indices tested anywhere in the tree.
  std::vector<int> features_used() const;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const;
  int depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  int feature_count_;
  std::vector<std::string> class_names_;
  std::vector<Node> nodes_;
};

struct SplitScore {
  double gain = 0.0;
  double split_info = 0.0;
  double gain_ratio = 0.0;
};

/// Information gain (bits), split information and their ratio for a binary
/// partition given per-class counts on each side.
SplitScore score_split(std::span<const std::size_t> left, std::span<const std::size_t> right);

/// Upper confidence bound on the error rate of a leaf with `errors`
/// misclassified out of `n` (normal approximation, z = Phi^-1(1 - C)).
double pessimistic_error_rate(double errors, double n, double confidence);

/// Grows a tree by maximum gain ratio over midpoint thresholds, honoring
/// min_leaf on both sides of every split, then prunes when config.prune.
/// `class_names` fixes the label space; when empty, labels 0..max are named
/// by their number.
DecisionTree induce(std::span<const LabeledRow> rows, const InductionConfig& config,
                    std::vector<std::string> class_names = {});

/// Bottom-up pessimistic pruning. Node counts are recomputed by routing
/// `rows`; a subtree becomes a majority leaf when the leaf's estimated
/// errors do not exceed the subtree's.
DecisionTree prune(const DecisionTree& tree, std::span<const LabeledRow> rows,
                   double confidence);

std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(std::string_view text);

struct CrossValidationResult {
  std::vector<int> fold_of_row;
  std::vector<MetricsReport> folds;
  MetricsReport pooled;
};

/// Stratified k-fold cross-validation (seeded by config.seed). `positive`
/// is the class scored as positive.
CrossValidationResult cross_validate(std::span<const LabeledRow> rows, int k,
                                     const InductionConfig& config,
                                     std::vector<std::string> class_names, int positive);

std::string cross_validation_to_json(const CrossValidationResult& result);

}  // namespace dermveil
