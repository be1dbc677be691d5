#include "marginfuse/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "marginfuse/csv.hpp"

namespace marginfuse {

namespace {

int majority_class(const std::vector<int>& counts) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(counts.size()); ++j) {
    if (counts[j] > counts[best]) best = j;
  }
  return best;
}

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (const int cnt : counts) {
    const double p = static_cast<double>(cnt) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct Builder {
  const Eigen::Ref<const Eigen::MatrixXd>& features;
  const Eigen::Ref<const Eigen::VectorXi>& labels;
  int num_classes;
  int max_depth;
  int min_leaf;
  int feature_subsample;
  Rng& rng;
  std::vector<TreeNode> nodes;

  int make_leaf(const std::vector<int>& counts) {
    TreeNode node;
    node.leaf_class = majority_class(counts);
    nodes.push_back(node);
    return static_cast<int>(nodes.size()) - 1;
  }

  int build(std::vector<int>& idx, int depth) {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (const int i : idx) ++counts[static_cast<std::size_t>(labels(i))];
    const int total = static_cast<int>(idx.size());
    const bool pure =
        *std::max_element(counts.begin(), counts.end()) == total;
    if (depth >= max_depth || pure || total < min_leaf) return make_leaf(counts);

    // Best Gini-gain split over a sorted random feature subset; ties keep
    // the first candidate so the tree is a pure function of the rng stream.
    const double parent_impurity = gini(counts, total);
    const std::vector<int> feats =
        rng.sample_distinct(static_cast<int>(features.cols()), feature_subsample);
    double best_gain = -1.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> values(idx.size());  // (value, label)
    for (const int f : feats) {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        values[i] = {features(idx[i], f), labels(idx[i])};
      }
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<int> left_counts(static_cast<std::size_t>(num_classes), 0);
      std::vector<int> right_counts = counts;
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        ++left_counts[static_cast<std::size_t>(values[i].second)];
        --right_counts[static_cast<std::size_t>(values[i].second)];
        if (values[i].first == values[i + 1].first) continue;
        const int n_left = static_cast<int>(i) + 1;
        const int n_right = total - n_left;
        const double gain =
            parent_impurity - (n_left * gini(left_counts, n_left) +
                               n_right * gini(right_counts, n_right)) /
                                  total;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (values[i].first + values[i + 1].first);
        }
      }
    }
    if (best_feature < 0) return make_leaf(counts);  // subset was constant

    std::vector<int> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    for (const int i : idx) {
      (features(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    const int node_id = static_cast<int>(nodes.size());
    TreeNode node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    nodes.push_back(node);
    const int left = build(left_idx, depth + 1);
    const int right = build(right_idx, depth + 1);
    nodes[static_cast<std::size_t>(node_id)].left = left;
    nodes[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }
};

}  // namespace

int TreeModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& split = nodes[static_cast<std::size_t>(node)];
    node = x(split.feature) <= split.threshold ? split.left : split.right;
  }
  return nodes[static_cast<std::size_t>(node)].leaf_class;
}

int TreeModel::depth() const {
  std::vector<int> depth_of(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {  // parents precede children
    const TreeNode& node = nodes[i];
    if (node.feature < 0) {
      deepest = std::max(deepest, depth_of[i]);
    } else {
      depth_of[static_cast<std::size_t>(node.left)] = depth_of[i] + 1;
      depth_of[static_cast<std::size_t>(node.right)] = depth_of[i] + 1;
    }
  }
  return deepest;
}

TreeModel train_tree(const Eigen::Ref<const Eigen::MatrixXd>& features,
                     const Eigen::Ref<const Eigen::VectorXi>& labels, int max_depth,
                     int min_leaf, int feature_subsample, Rng& rng) {
  if (features.rows() == 0) throw std::invalid_argument("train_tree: no samples");
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("train_tree: features/labels size mismatch");
  }
  if (labels.minCoeff() < 0) throw std::invalid_argument("train_tree: negative label");
  if (max_depth < 0) throw std::invalid_argument("train_tree: negative max depth");
  if (feature_subsample < 1) {
    throw std::invalid_argument("train_tree: feature subsample must be >= 1");
  }
  Builder builder{features, labels, labels.maxCoeff() + 1, max_depth,
                  min_leaf, feature_subsample, rng, {}};
  std::vector<int> idx(static_cast<std::size_t>(features.rows()));
  for (int i = 0; i < features.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  builder.build(idx, 0);
  return TreeModel{std::move(builder.nodes)};
}

ForestModel train_forest(const Eigen::Ref<const Eigen::MatrixXd>& features,
                         const Eigen::Ref<const Eigen::VectorXi>& labels, int num_classes,
                         int k, int max_depth, std::uint64_t seed, int min_leaf) {
  if (k < 1) throw std::invalid_argument("train_forest: need k >= 1");
  if (features.rows() == 0) throw std::invalid_argument("train_forest: no samples");
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("train_forest: features/labels size mismatch");
  }
  if (labels.minCoeff() < 0 || labels.maxCoeff() >= num_classes) {
    throw std::invalid_argument("train_forest: label outside 0..c-1");
  }
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  const int subsample = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

  ForestModel forest;
  forest.c = num_classes;
  forest.feature_count = d;
  forest.max_depth = max_depth;
  forest.min_leaf = min_leaf;
  forest.seed = seed;
  forest.trees.reserve(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd boot_features(n, d);
    Eigen::VectorXi boot_labels(n);
    for (int i = 0; i < n; ++i) {
      const int src = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      boot_features.row(i) = features.row(src);
      boot_labels(i) = labels(src);
    }
    forest.trees.push_back(
        train_tree(boot_features, boot_labels, max_depth, min_leaf, subsample, rng));
  }
  return forest;
}

PredictionStack predict_stack(const ForestModel& forest,
                              const Eigen::Ref<const Eigen::MatrixXd>& features) {
  if (features.cols() != forest.feature_count) {
    throw std::invalid_argument("predict_stack: feature width " +
                                std::to_string(features.cols()) + " != model width " +
                                std::to_string(forest.feature_count));
  }
  Eigen::MatrixXi preds(features.rows(), forest.k());
  for (int i = 0; i < features.rows(); ++i) {
    for (int l = 0; l < forest.k(); ++l) {
      preds(i, l) = forest.trees[static_cast<std::size_t>(l)].predict(features.row(i));
    }
  }
  return PredictionStack(std::move(preds), forest.c);
}

PredictionStack import_stack(const std::string& path, const LabelDict& labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import_stack: cannot open " + path);
  std::string line;
  std::vector<std::vector<int>> rows;
  int k = -1;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> cells = split_csv_line(line);
    if (first) {
      first = false;
      bool is_header = true;
      for (std::size_t j = 0; j < cells.size(); ++j) {
        if (cells[j] != "clf_" + std::to_string(j)) {
          is_header = false;
          break;
        }
      }
      if (is_header) {
        k = static_cast<int>(cells.size());
        continue;
      }
    }
    if (k < 0) {
      k = static_cast<int>(cells.size());
    } else if (static_cast<int>(cells.size()) != k) {
      throw std::runtime_error("import_stack: row " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(k));
    }
    std::vector<int> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const int cls = labels.encode(cells[j]);
      if (cls < 0) {
        throw std::runtime_error("import_stack: row " + std::to_string(line_no) +
                                 ": label '" + cells[j] + "' not in dictionary");
      }
      row[j] = cls;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("import_stack: no prediction rows in " + path);
  Eigen::MatrixXi preds(static_cast<int>(rows.size()), k);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    for (int j = 0; j < k; ++j) preds(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return PredictionStack(std::move(preds), labels.size());
}

}  // namespace marginfuse
