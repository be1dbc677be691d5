#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace marginfuse {

// Training and loss hyperparameters. alpha is the sharpness of the smooth
// second-max, gamma the margin weight, lr the gradient-descent step size.
struct HyperParams {
  double alpha = 10.0;
  double gamma = 5.0;
  double lr = 0.1;
  int batch = 64;
  int epochs = 500;
  double tol = 1e-7;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("HyperParams: alpha must be > 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("HyperParams: gamma must be >= 0");
    if (!(lr > 0.0)) throw std::invalid_argument("HyperParams: lr must be > 0");
    if (batch < 1) throw std::invalid_argument("HyperParams: batch must be >= 1");
    if (epochs < 0) throw std::invalid_argument("HyperParams: epochs must be >= 0");
    if (!(tol >= 0.0)) throw std::invalid_argument("HyperParams: tol must be >= 0");
  }
};

// One loss evaluation split into its three terms:
//   l1 = -log s_m           (cross-entropy)
//   l2 = -gamma * s_m
//   l3 =  gamma * smooth_max2(s, m, alpha)
// total = l1 + l2 + l3 = ce - gamma * margin_smooth. `floored` is set when
// s_m underflowed and the log argument was clamped at 1e-300.
struct LossBreakdown {
  double ce = 0.0;
  double margin_smooth = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double total = 0.0;
  bool floored = false;
};

// Bijective mapping between original label strings and class indices
// 0..c-1. `names` is indexed by class; `index` inverts it.
struct LabelDict {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> index;

  int size() const { return static_cast<int>(names.size()); }

  // Returns the class for a label token, or -1 if unknown.
  int encode(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? -1 : it->second;
  }

  const std::string& decode(int cls) const {
    if (cls < 0 || cls >= size()) {
      throw std::invalid_argument("LabelDict: class index out of range");
    }
    return names[static_cast<std::size_t>(cls)];
  }

  static LabelDict from_names(std::vector<std::string> sorted_names) {
    LabelDict d;
    d.names = std::move(sorted_names);
    for (int i = 0; i < d.size(); ++i) d.index.emplace(d.names[i], i);
    if (d.index.size() != d.names.size()) {
      throw std::invalid_argument("LabelDict: duplicate label name");
    }
    return d;
  }
};

// Per-sample base-classifier predictions. Every row of the paper-level
// k x c one-hot matrix g_i carries exactly one 1, so the stack is stored
// compactly as an n x k matrix of predicted class indices; one_hot_sample()
// materializes g_i on demand.
class PredictionStack {
 public:
  PredictionStack() = default;

  PredictionStack(Eigen::MatrixXi preds, int num_classes)
      : preds_(std::move(preds)), c_(num_classes) {
    if (c_ < 1) throw std::invalid_argument("PredictionStack: class count must be >= 1");
    if (preds_.size() > 0 && (preds_.minCoeff() < 0 || preds_.maxCoeff() >= c_)) {
      throw std::invalid_argument("PredictionStack: prediction outside 0..c-1");
    }
  }

  int n() const { return static_cast<int>(preds_.rows()); }
  int k() const { return static_cast<int>(preds_.cols()); }
  int c() const { return c_; }

  int pred(int sample, int classifier) const { return preds_(sample, classifier); }

  Eigen::MatrixXi::ConstRowXpr sample(int i) const { return preds_.row(i); }

  const Eigen::MatrixXi& preds() const { return preds_; }

  // The k x c one-hot matrix g_i of the paper's Eq-level notation.
  Eigen::MatrixXd one_hot_sample(int i) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k(), c_);
    for (int l = 0; l < k(); ++l) g(l, preds_(i, l)) = 1.0;
    return g;
  }

 private:
  Eigen::MatrixXi preds_;
  int c_ = 0;
};

}  // namespace marginfuse
