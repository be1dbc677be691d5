#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "marginfuse/rng.hpp"
#include "marginfuse/types.hpp"

namespace marginfuse {

// Binary CART split node stored in a flat array; feature == -1 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_class = -1;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  // Descend with the rule: go left iff x(feature) <= threshold.
  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  int depth() const;  // longest root-to-leaf edge count
};

struct ForestModel {
  std::vector<TreeModel> trees;
  int c = 0;
  int feature_count = 0;
  int max_depth = 0;
  int min_leaf = 1;
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(trees.size()); }
};

// Greedy CART induction by Gini gain. Each split considers a random subset
// of `feature_subsample` features; candidate thresholds are the midpoints
// between consecutive distinct values. Recursion stops at max_depth, on a
// pure node, or when fewer than min_leaf samples remain; leaves take the
// majority class (lowest index on ties).
TreeModel train_tree(const Eigen::Ref<const Eigen::MatrixXd>& features,
                     const Eigen::Ref<const Eigen::VectorXi>& labels, int max_depth,
                     int min_leaf, int feature_subsample, Rng& rng);

// k trees, each grown on a bootstrap resample (n draws with replacement)
// with per-split feature subsets of size ceil(sqrt(d)). Tree t draws from
// its own stream derived from (seed, t). num_classes fixes the one-hot
// width even if a resample misses a class.
ForestModel train_forest(const Eigen::Ref<const Eigen::MatrixXd>& features,
                         const Eigen::Ref<const Eigen::VectorXi>& labels, int num_classes,
                         int k, int max_depth, std::uint64_t seed, int min_leaf = 1);

PredictionStack predict_stack(const ForestModel& forest,
                              const Eigen::Ref<const Eigen::MatrixXd>& features);

// Reads an n x k CSV of base-classifier predictions, one column per
// classifier, mapping each cell through the dataset's label dictionary.
// An optional first row "clf_0,clf_1,..." is skipped.
PredictionStack import_stack(const std::string& path, const LabelDict& labels);

}  // namespace marginfuse
