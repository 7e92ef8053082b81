#include "dermveil/dtree.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "dermveil/error.hpp"
#include "dermveil/rng.hpp"

namespace dermveil {
namespace {

using Json = nlohmann::ordered_json;

double entropy_of(std::span<const std::size_t> counts) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (const std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

int majority(std::span<const std::size_t> counts) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(counts.size()); ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  return best;
}

bool is_pure(std::span<const std::size_t> counts) {
  int nonzero = 0;
  for (const std::size_t c : counts) nonzero += c > 0 ? 1 : 0;
  return nonzero <= 1;
}

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  double ratio = 0.0;
};

class Grower {
 public:
  Grower(std::span<const LabeledRow> rows, const InductionConfig& config, int classes)
      : rows_(rows), config_(config), classes_(classes) {}

  std::vector<DecisionTree::Node> grow(std::vector<std::size_t> indices) {
    nodes_.clear();
    build(indices, 0);
    return std::move(nodes_);
  }

 private:
  std::vector<std::size_t> count(std::span<const std::size_t> indices) const {
    std::vector<std::size_t> c(classes_, 0);
    for (const std::size_t i : indices) ++c[rows_[i].label];
    return c;
  }

  int build(std::vector<std::size_t>& indices, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    auto counts = count(indices);
    nodes_[id].label = majority(counts);
    nodes_[id].counts = counts;

    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, config_.min_leaf));
    const bool depth_exhausted = config_.max_depth && depth >= *config_.max_depth;
    if (is_pure(counts) || indices.size() < 2 * min_leaf || depth_exhausted) return id;

    const Candidate best = best_split(indices, counts, min_leaf);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (const std::size_t i : indices) {
      (rows_[i].features[best.feature] <= best.threshold ? left : right).push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    const int l = build(left, depth + 1);
    nodes_[id].left = l;
    const int r = build(right, depth + 1);
    nodes_[id].right = r;
    return id;
  }

  Candidate best_split(std::span<const std::size_t> indices,
                       const std::vector<std::size_t>& counts, std::size_t min_leaf) const {
    Candidate best;
    const int feature_count = static_cast<int>(rows_[indices[0]].features.size());
    std::vector<std::size_t> order(indices.begin(), indices.end());
    std::vector<std::size_t> left(classes_), right(classes_);
    for (int f = 0; f < feature_count; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = rows_[a].features[f];
        const double vb = rows_[b].features[f];
        return va < vb || (va == vb && a < b);
      });
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
        const int label = rows_[order[pos]].label;
        ++left[label];
        --right[label];
        const double lo = rows_[order[pos]].features[f];
        const double hi = rows_[order[pos + 1]].features[f];
        if (!(lo < hi)) continue;
        const std::size_t n_left = pos + 1;
        const std::size_t n_right = order.size() - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const SplitScore s = score_split(left, right);
        if (!(s.gain > 1e-12)) continue;
        if (best.feature < 0 || s.gain_ratio > best.ratio + 1e-12) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {f, mid, s.gain_ratio};
        }
      }
    }
    return best;
  }

  std::span<const LabeledRow> rows_;
  const InductionConfig& config_;
  int classes_;
  std::vector<DecisionTree::Node> nodes_;
};

void check_rows(std::span<const LabeledRow> rows, int classes) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "training set is empty");
  const std::size_t width = rows[0].features.size();
  if (width == 0) throw Error(ErrorKind::InvalidArgument, "rows have no features");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].features.size() != width) {
      throw Error(ErrorKind::InvalidArgument,
                  "row " + std::to_string(i) + " has " + std::to_string(rows[i].features.size()) +
                      " features, expected " + std::to_string(width));
    }
    if (rows[i].label < 0 || rows[i].label >= classes) {
      throw Error(ErrorKind::InvalidArgument,
                  "row " + std::to_string(i) + " has label " + std::to_string(rows[i].label) +
                      " outside the class list");
    }
    for (const double v : rows[i].features) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(i) + " has a non-finite feature");
      }
    }
  }
}

std::vector<std::string> default_class_names(std::span<const LabeledRow> rows) {
  int top = 0;
  for (const auto& r : rows) top = std::max(top, r.label);
  std::vector<std::string> names;
  for (int k = 0; k <= top; ++k) names.push_back(std::to_string(k));
  return names;
}

// --- pruning ---------------------------------------------------------------

struct PruneState {
  const std::vector<DecisionTree::Node>& in;
  std::vector<std::vector<std::size_t>> routed;  // per input node
  double confidence;
  std::vector<DecisionTree::Node> out;
};

double leaf_errors(std::span<const std::size_t> counts, int label, double confidence) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (n <= 0.0) return 0.0;
  const double errors = n - static_cast<double>(counts[label]);
  return n * pessimistic_error_rate(errors, n, confidence);
}

// Returns (estimated errors of the pruned subtree, its nodes in preorder).
std::pair<double, std::vector<DecisionTree::Node>> prune_node(PruneState& st, int id) {
  const DecisionTree::Node& node = st.in[id];
  DecisionTree::Node copy = node;
  copy.counts = st.routed[id];
  if (node.is_leaf()) {
    return {leaf_errors(copy.counts, copy.label, st.confidence), {copy}};
  }
  auto [left_err, left_nodes] = prune_node(st, node.left);
  auto [right_err, right_nodes] = prune_node(st, node.right);
  const double subtree = left_err + right_err;
  const int as_label = majority(copy.counts);
  const double as_leaf = leaf_errors(copy.counts, as_label, st.confidence);
  if (as_leaf <= subtree + 1e-9) {
    DecisionTree::Node leaf;
    leaf.label = as_label;
    leaf.counts = copy.counts;
    return {as_leaf, {leaf}};
  }
  copy.label = as_label;
  std::vector<DecisionTree::Node> nodes;
  nodes.reserve(1 + left_nodes.size() + right_nodes.size());
  nodes.push_back(copy);
  const int left_offset = 1;
  const int right_offset = 1 + static_cast<int>(left_nodes.size());
  auto append = [&](std::vector<DecisionTree::Node>& part, int offset) {
    for (auto& n : part) {
      if (!n.is_leaf()) {
        n.left += offset;
        n.right += offset;
      }
      nodes.push_back(std::move(n));
    }
  };
  append(left_nodes, left_offset);
  append(right_nodes, right_offset);
  nodes[0].left = left_offset;
  nodes[0].right = right_offset;
  return {subtree, std::move(nodes)};
}

// --- JSON ------------------------------------------------------------------

Json node_to_json(const DecisionTree& tree, int id) {
  const auto& node = tree.nodes()[id];
  Json j;
  if (node.is_leaf()) {
    Json leaf;
    leaf["class"] = tree.class_names()[node.label];
    leaf["counts"] = node.counts;
    j["leaf"] = std::move(leaf);
    return j;
  }
  j["feature"] = node.feature + 1;
  j["threshold"] = node.threshold;
  if (!node.counts.empty()) j["counts"] = node.counts;
  j["left"] = node_to_json(tree, node.left);
  j["right"] = node_to_json(tree, node.right);
  return j;
}

[[noreturn]] void tree_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Parse, "tree " + path + ": " + what);
}

std::vector<std::size_t> counts_from_json(const Json& j, const std::string& path,
                                          std::size_t classes) {
  if (!j.is_array()) tree_error(path, "expected an array of counts");
  std::vector<std::size_t> counts;
  for (const auto& v : j) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      tree_error(path, "counts must be non-negative integers");
    }
    counts.push_back(v.get<std::size_t>());
  }
  if (!counts.empty() && counts.size() != classes) {
    tree_error(path, "expected " + std::to_string(classes) + " counts");
  }
  return counts;
}

int node_from_json(const Json& j, const std::string& path, const std::vector<std::string>& classes,
                   int feature_count, std::vector<DecisionTree::Node>& out) {
  if (!j.is_object()) tree_error(path, "expected an object");
  const int id = static_cast<int>(out.size());
  out.emplace_back();
  if (j.contains("leaf")) {
    const Json& leaf = j.at("leaf");
    if (!leaf.is_object() || !leaf.contains("class")) tree_error(path + ".leaf", "expected {class, counts}");
    const Json& cls = leaf.at("class");
    int label = -1;
    if (cls.is_string()) {
      const auto it = std::find(classes.begin(), classes.end(), cls.get<std::string>());
      if (it == classes.end()) tree_error(path + ".leaf.class", "unknown class '" + cls.get<std::string>() + "'");
      label = static_cast<int>(it - classes.begin());
    } else if (cls.is_number_integer()) {
      label = cls.get<int>();
      if (label < 0 || label >= static_cast<int>(classes.size())) tree_error(path + ".leaf.class", "class index out of range");
    } else {
      tree_error(path + ".leaf.class", "expected a class name");
    }
    out[id].label = label;
    if (leaf.contains("counts")) out[id].counts = counts_from_json(leaf.at("counts"), path + ".leaf.counts", classes.size());
    return id;
  }
  for (const char* key : {"feature", "threshold", "left", "right"}) {
    if (!j.contains(key)) tree_error(path + "." + key, "missing field");
  }
  if (!j.at("feature").is_number_integer()) tree_error(path + ".feature", "expected an integer");
  const int feature = j.at("feature").get<int>();
  if (feature < 1 || feature > feature_count) {
    tree_error(path + ".feature", "feature " + std::to_string(feature) + " outside 1.." +
                                      std::to_string(feature_count));
  }
  if (!j.at("threshold").is_number()) tree_error(path + ".threshold", "expected a number");
  out[id].feature = feature - 1;
  out[id].threshold = j.at("threshold").get<double>();
  if (j.contains("counts")) {
    out[id].counts = counts_from_json(j.at("counts"), path + ".counts", classes.size());
    if (!out[id].counts.empty()) out[id].label = majority(out[id].counts);
  }
  const int l = node_from_json(j.at("left"), path + ".left", classes, feature_count, out);
  out[id].left = l;
  const int r = node_from_json(j.at("right"), path + ".right", classes, feature_count, out);
  out[id].right = r;
  return id;
}

}  // namespace

InductionConfig compact_induction_profile() {
  InductionConfig c;
  c.confidence = 0.1;
  c.min_leaf = 100;
  return c;
}

DecisionTree::DecisionTree(int feature_count, std::vector<std::string> class_names,
                           std::vector<Node> nodes)
    : feature_count_(feature_count),
      class_names_(std::move(class_names)),
      nodes_(std::move(nodes)) {
  if (feature_count_ < 1) throw Error(ErrorKind::InvalidArgument, "tree needs at least one feature");
  if (class_names_.empty()) throw Error(ErrorKind::InvalidArgument, "tree needs at least one class");
  if (nodes_.empty()) throw Error(ErrorKind::InvalidArgument, "tree has no nodes");
  const int n = static_cast<int>(nodes_.size());
  std::vector<int> parents(n, 0);
  for (int i = 0; i < n; ++i) {
    const Node& node = nodes_[i];
    if (node.label < 0 || node.label >= static_cast<int>(class_names_.size())) {
      throw Error(ErrorKind::InvalidArgument, "node " + std::to_string(i) + " has an unknown class");
    }
    if (!node.counts.empty() && node.counts.size() != class_names_.size()) {
      throw Error(ErrorKind::InvalidArgument, "node " + std::to_string(i) + " has malformed counts");
    }
    if (node.is_leaf()) continue;
    if (node.feature >= feature_count_) {
      throw Error(ErrorKind::InvalidArgument,
                  "node " + std::to_string(i) + " tests feature " + std::to_string(node.feature + 1) +
                      " of " + std::to_string(feature_count_));
    }
    if (node.left <= i || node.right <= i || node.left >= n || node.right >= n) {
      throw Error(ErrorKind::InvalidArgument, "node " + std::to_string(i) + " has invalid children");
    }
    ++parents[node.left];
    ++parents[node.right];
  }
  for (int i = 1; i < n; ++i) {
    if (parents[i] != 1) {
      throw Error(ErrorKind::InvalidArgument, "node " + std::to_string(i) + " is not a tree node");
    }
  }
}

DecisionTree DecisionTree::constant(int feature_count, std::vector<std::string> class_names,
                                    int label) {
  Node leaf;
  leaf.label = label;
  return DecisionTree(feature_count, std::move(class_names), {leaf});
}

int DecisionTree::predict(std::span<const double> features) const {
  if (features.size() != static_cast<std::size_t>(feature_count_)) {
    throw Error(ErrorKind::InvalidArgument,
                "tree expects " + std::to_string(feature_count_) + " features, got " +
                    std::to_string(features.size()));
  }
  int id = 0;
  while (!nodes_[id].is_leaf()) {
    const Node& node = nodes_[id];
    id = features[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].label;
}

std::optional<int> DecisionTree::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < class_names_.size(); ++i) {
    if (class_names_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::vector<int> DecisionTree::features_used() const {
  std::vector<int> out;
  for (const Node& n : nodes_) {
    if (!n.is_leaf()) out.push_back(n.feature);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return deepest;
}

SplitScore score_split(std::span<const std::size_t> left, std::span<const std::size_t> right) {
  std::vector<std::size_t> parent(left.begin(), left.end());
  for (std::size_t k = 0; k < right.size(); ++k) parent[k] += right[k];
  const double n_left = std::accumulate(left.begin(), left.end(), 0.0);
  const double n_right = std::accumulate(right.begin(), right.end(), 0.0);
  const double n = n_left + n_right;
  SplitScore s;
  if (n_left <= 0.0 || n_right <= 0.0) return s;
  s.gain = entropy_of(parent) - (n_left / n) * entropy_of(left) - (n_right / n) * entropy_of(right);
  const std::size_t sizes[2] = {static_cast<std::size_t>(n_left), static_cast<std::size_t>(n_right)};
  s.split_info = entropy_of(sizes);
  s.gain_ratio = s.gain / s.split_info;
  return s;
}

double pessimistic_error_rate(double errors, double n, double confidence) {
  if (!(confidence > 0.0 && confidence <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "confidence factor must lie in (0, 1]");
  }
  if (n <= 0.0) return 0.0;
  // Zero errors: exact binomial bound, (1 - U)^n = C.
  const double zero_bound = 1.0 - std::pow(confidence, 1.0 / n);
  if (errors < 1e-6) return zero_bound;
  if (errors < 0.9999) {
    const double one_bound = pessimistic_error_rate(1.0, n, confidence);
    return zero_bound + errors * (one_bound - zero_bound);
  }
  if (errors + 0.5 >= n) return (errors + 0.67 * (n - errors)) / n;
  // Normal approximation with continuity correction; z = 0 for C >= 0.5.
  double z = 0.0;
  if (confidence < 0.5) {
    z = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - confidence);
  }
  const double z2 = z * z;
  const double e = errors + 0.5;
  return (e + z2 / 2.0 + z * std::sqrt(e * (1.0 - e / n) + z2 / 4.0)) / (n + z2);
}

DecisionTree induce(std::span<const LabeledRow> rows, const InductionConfig& config,
                    std::vector<std::string> class_names) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "training set is empty");
  if (class_names.empty()) class_names = default_class_names(rows);
  const int classes = static_cast<int>(class_names.size());
  check_rows(rows, classes);
  if (config.min_leaf < 1) throw Error(ErrorKind::InvalidArgument, "min_leaf must be >= 1");
  if (!(config.confidence > 0.0 && config.confidence <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "confidence factor must lie in (0, 1]");
  }

  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), 0);
  Grower grower(rows, config, classes);
  DecisionTree grown(static_cast<int>(rows[0].features.size()), std::move(class_names),
                     grower.grow(std::move(all)));
  return config.prune ? prune(grown, rows, config.confidence) : grown;
}

DecisionTree prune(const DecisionTree& tree, std::span<const LabeledRow> rows,
                   double confidence) {
  const std::size_t classes = tree.class_names().size();
  check_rows(rows, static_cast<int>(classes));
  PruneState st{tree.nodes(), std::vector<std::vector<std::size_t>>(
                                  tree.node_count(), std::vector<std::size_t>(classes, 0)),
                confidence, {}};
  for (const auto& row : rows) {
    if (row.features.size() != static_cast<std::size_t>(tree.feature_count())) {
      throw Error(ErrorKind::InvalidArgument, "row width differs from tree feature count");
    }
    int id = 0;
    while (true) {
      ++st.routed[id][row.label];
      const auto& node = st.in[id];
      if (node.is_leaf()) break;
      id = row.features[node.feature] <= node.threshold ? node.left : node.right;
    }
  }
  auto [errors, nodes] = prune_node(st, 0);
  (void)errors;
  return DecisionTree(tree.feature_count(), tree.class_names(), std::move(nodes));
}

std::string tree_to_json(const DecisionTree& tree) {
  Json doc;
  doc["classes"] = tree.class_names();
  doc["feature_count"] = tree.feature_count();
  doc["root"] = node_to_json(tree, 0);
  return doc.dump(2) + "\n";
}

DecisionTree tree_from_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("tree JSON: ") + e.what());
  }
  if (!doc.is_object()) tree_error("<root>", "expected an object");
  if (!doc.contains("classes") || !doc.at("classes").is_array() || doc.at("classes").empty()) {
    tree_error("classes", "expected a non-empty array of class names");
  }
  std::vector<std::string> classes;
  for (const auto& c : doc.at("classes")) {
    if (!c.is_string()) tree_error("classes", "class names must be strings");
    classes.push_back(c.get<std::string>());
  }
  if (!doc.contains("feature_count") || !doc.at("feature_count").is_number_integer()) {
    tree_error("feature_count", "expected an integer");
  }
  const int feature_count = doc.at("feature_count").get<int>();
  if (feature_count < 1) tree_error("feature_count", "must be positive");
  if (!doc.contains("root")) tree_error("root", "missing field");
  std::vector<DecisionTree::Node> nodes;
  node_from_json(doc.at("root"), "root", classes, feature_count, nodes);
  return DecisionTree(feature_count, std::move(classes), std::move(nodes));
}

CrossValidationResult cross_validate(std::span<const LabeledRow> rows, int k,
                                     const InductionConfig& config,
                                     std::vector<std::string> class_names, int positive) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "cross-validation needs k >= 2");
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "training set is empty");
  if (class_names.empty()) class_names = default_class_names(rows);
  const int classes = static_cast<int>(class_names.size());
  check_rows(rows, classes);

  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < rows.size(); ++i) by_class[rows[i].label].push_back(i);
  for (int c = 0; c < classes; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorKind::InvalidArgument,
                  "class '" + class_names[c] + "' has " + std::to_string(by_class[c].size()) +
                      " rows, fewer than k = " + std::to_string(k));
    }
  }

  CrossValidationResult result;
  result.fold_of_row.assign(rows.size(), 0);
  Rng rng(config.seed);
  std::size_t next = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (const std::size_t i : members) result.fold_of_row[i] = static_cast<int>(next++ % k);
  }

  for (int fold = 0; fold < k; ++fold) {
    std::vector<LabeledRow> train;
    std::vector<std::size_t> held;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (result.fold_of_row[i] == fold) {
        held.push_back(i);
      } else {
        train.push_back(rows[i]);
      }
    }
    const DecisionTree tree = induce(train, config, class_names);
    std::vector<int> predicted, actual;
    for (const std::size_t i : held) {
      predicted.push_back(tree.predict(rows[i].features));
      actual.push_back(rows[i].label);
    }
    result.folds.push_back(confusion(predicted, actual, positive));
  }
  result.pooled = pool(result.folds);
  return result;
}

std::string cross_validation_to_json(const CrossValidationResult& result) {
  Json doc;
  doc["k"] = result.folds.size();
  Json folds = Json::array();
  for (const auto& f : result.folds) folds.push_back(Json::parse(metrics_to_json(f, -1)));
  doc["folds"] = std::move(folds);
  doc["pooled"] = Json::parse(metrics_to_json(result.pooled, -1));
  return doc.dump(2) + "\n";
}

}  // namespace dermveil
