#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "marginfuse/ensemble.hpp"
#include "marginfuse/types.hpp"

// Margin-maximizing loss over the fused class probabilities s and its
// closed-form gradient with respect to the confidence matrix.
//
// Per sample with true class m:
//   L  = L1 + L2 + L3
//   L1 = -log s_m
//   L2 = -gamma * s_m
//   L3 =  gamma * (1/alpha) * log(1 + sum_{j != m} exp(alpha * s_j))
// The L3 sum is the logsumexp relaxation of the second-highest probability;
// together L2 + L3 equal -gamma times the smoothed margin.
//
// Gradient entries follow from the softmax derivative
//   d s_j / d theta(k,l) = s_j * (delta_{kj} g(l,j) - g(l,k) * s_k),
// which confines column l of the per-sample gradient to rows {m, p_l}
// where p_l is classifier l's vote.

namespace marginfuse {

// Second-largest entry, counting multiplicity: a duplicated maximum is its
// own runner-up.
template <typename Derived>
typename Derived::Scalar max2_exact(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.size() < 2) throw std::invalid_argument("max2_exact: need at least 2 entries");
  Scalar top = s(0), second = s(1);
  if (second > top) std::swap(top, second);
  for (Eigen::Index j = 2; j < s.size(); ++j) {
    const Scalar v = s(j);
    if (v > top) {
      second = top;
      top = v;
    } else if (v > second) {
      second = v;
    }
  }
  return second;
}

// Smooth stand-in for the largest non-true-class probability:
//   (1/alpha) * log(1 + sum_{j != m} exp(alpha * s_j)),
// computed with max-subtraction. The constant 1 is the true-class term
// exp(alpha * (s_m - s_m)). Sandwiched between max(0, max_{j!=m} s_j) and
// that value plus log(c)/alpha.
template <typename Derived>
typename Derived::Scalar smooth_max2(const Eigen::MatrixBase<Derived>& s, int true_class,
                                     typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (true_class < 0 || true_class >= s.size()) {
    throw std::invalid_argument("smooth_max2: true class index out of range");
  }
  if (!(alpha > Scalar(0))) throw std::invalid_argument("smooth_max2: alpha must be > 0");
  Scalar peak = Scalar(0);  // exponent of the constant term
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (j != true_class) peak = std::max(peak, alpha * s(j));
  }
  Scalar sum = std::exp(-peak);
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (j != true_class) sum += std::exp(alpha * s(j) - peak);
  }
  return (peak + std::log(sum)) / alpha;
}

// Loss terms from an already-fused probability vector. This is the map the
// smoothing makes convex in s. An s_m below 1e-300 is clamped inside the
// log and flagged.
inline LossBreakdown loss_from_probs(const Eigen::Ref<const Eigen::VectorXd>& s,
                                     int true_class, const HyperParams& hp) {
  if (true_class < 0 || true_class >= s.size()) {
    throw std::invalid_argument("loss_from_probs: true class index out of range");
  }
  LossBreakdown out;
  const double sm = s(true_class);
  const double sm2 = smooth_max2(s, true_class, hp.alpha);
  constexpr double kLogFloor = 1e-300;
  out.floored = sm < kLogFloor;
  out.l1 = -std::log(out.floored ? kLogFloor : sm);
  out.l2 = -hp.gamma * sm;
  out.l3 = hp.gamma * sm2;
  out.ce = out.l1;
  out.margin_smooth = sm - sm2;
  out.total = out.l1 + out.l2 + out.l3;
  return out;
}

inline LossBreakdown sample_loss(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                 const Eigen::Ref<const Eigen::MatrixXd>& g, int true_class,
                                 const HyperParams& hp) {
  return loss_from_probs(softmax(class_scores(theta, g)), true_class, hp);
}

inline LossBreakdown sample_loss(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                 const Eigen::Ref<const Eigen::RowVectorXi>& preds,
                                 int true_class, const HyperParams& hp) {
  return loss_from_probs(softmax(class_scores(theta, preds)), true_class, hp);
}

// Field-wise mean of per-sample breakdowns over `indices`, accumulated in
// index order so the reduction is bit-stable.
inline LossBreakdown batch_loss(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                const PredictionStack& stack,
                                const Eigen::Ref<const Eigen::VectorXi>& labels,
                                const HyperParams& hp, const std::vector<int>& indices) {
  if (indices.empty()) throw std::invalid_argument("batch_loss: empty batch");
  if (labels.size() != stack.n()) {
    throw std::invalid_argument("batch_loss: labels length != stack size");
  }
  LossBreakdown acc;
  for (const int i : indices) {
    const LossBreakdown one = sample_loss(theta, stack.sample(i), labels(i), hp);
    acc.ce += one.ce;
    acc.margin_smooth += one.margin_smooth;
    acc.l1 += one.l1;
    acc.l2 += one.l2;
    acc.l3 += one.l3;
    acc.total += one.total;
    acc.floored = acc.floored || one.floored;
  }
  const double inv = 1.0 / static_cast<double>(indices.size());
  acc.ce *= inv;
  acc.margin_smooth *= inv;
  acc.l1 *= inv;
  acc.l2 *= inv;
  acc.l3 *= inv;
  acc.total *= inv;
  return acc;
}

inline LossBreakdown batch_loss(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                const PredictionStack& stack,
                                const Eigen::Ref<const Eigen::VectorXi>& labels,
                                const HyperParams& hp) {
  std::vector<int> all(static_cast<std::size_t>(stack.n()));
  for (int i = 0; i < stack.n(); ++i) all[static_cast<std::size_t>(i)] = i;
  return batch_loss(theta, stack, labels, hp, all);
}

// Analytic per-sample gradient. Column l receives
//   (L1+L2):  -(1 + gamma*s_m) * (delta_{km} g(l,m) - g(l,k) s_k)
//   (L3):      gamma * sum_{j != m} e^{a s_j} s_j (delta_{kj} g(l,j) - g(l,k) s_k)
//              / (1 + sum_{j != m} e^{a s_j})
// With one-hot votes both factors vanish outside rows {m, p_l}, so only
// those entries are written; the exponentials share one max-subtraction.
inline Eigen::MatrixXd sample_grad(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                   const Eigen::Ref<const Eigen::RowVectorXi>& preds,
                                   int true_class, const HyperParams& hp) {
  const Eigen::VectorXd s = softmax(class_scores(theta, preds));
  const int c = static_cast<int>(theta.rows());
  const int k = static_cast<int>(theta.cols());
  const int m = true_class;
  if (m < 0 || m >= c) throw std::invalid_argument("sample_grad: true class out of range");

  const double alpha = hp.alpha;
  double peak = 0.0;
  for (int j = 0; j < c; ++j) {
    if (j != m) peak = std::max(peak, alpha * s(j));
  }
  double denom = std::exp(-peak);          // scaled 1 + sum_{j != m} e^{a s_j}
  double weighted = 0.0;                   // scaled sum_{j != m} e^{a s_j} s_j
  Eigen::VectorXd w = Eigen::VectorXd::Zero(c);
  for (int j = 0; j < c; ++j) {
    if (j == m) continue;
    w(j) = std::exp(alpha * s(j) - peak);
    denom += w(j);
    weighted += w(j) * s(j);
  }

  const double sm = s(m);
  const double ce_coeff = 1.0 + hp.gamma * sm;  // shared by L1 and L2
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(c, k);
  for (int l = 0; l < k; ++l) {
    const int p = preds(l);
    if (p == m) {
      // Only row m survives: delta factor 1 - s_m, L3 sum collapses to -s_m * weighted.
      grad(m, l) = -ce_coeff * (1.0 - sm) + hp.gamma * (-sm * weighted) / denom;
    } else {
      // Only row p survives: delta factor -s_p, L3 sum gives s_p * (w_p - weighted).
      grad(p, l) = ce_coeff * s(p) + hp.gamma * (s(p) * (w(p) - weighted)) / denom;
    }
  }
  return grad;
}

inline Eigen::MatrixXd sample_grad(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                   const Eigen::Ref<const Eigen::MatrixXd>& g, int true_class,
                                   const HyperParams& hp) {
  if (theta.cols() != g.rows() || theta.rows() != g.cols()) {
    throw std::invalid_argument("sample_grad: theta is c x k but g is not k x c");
  }
  Eigen::RowVectorXi preds(g.rows());
  for (Eigen::Index l = 0; l < g.rows(); ++l) {
    preds(static_cast<int>(l)) = argmax_lowest(g.row(l));
  }
  return sample_grad(theta, preds, true_class, hp);
}

// Mean of per-sample gradients in fixed index order.
inline Eigen::MatrixXd batch_grad(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                  const PredictionStack& stack,
                                  const Eigen::Ref<const Eigen::VectorXi>& labels,
                                  const HyperParams& hp, const std::vector<int>& indices) {
  if (indices.empty()) throw std::invalid_argument("batch_grad: empty batch");
  if (labels.size() != stack.n()) {
    throw std::invalid_argument("batch_grad: labels length != stack size");
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
  for (const int i : indices) {
    acc += sample_grad(theta, stack.sample(i), labels(i), hp);
  }
  return acc / static_cast<double>(indices.size());
}

inline Eigen::MatrixXd batch_grad(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                  const PredictionStack& stack,
                                  const Eigen::Ref<const Eigen::VectorXi>& labels,
                                  const HyperParams& hp) {
  std::vector<int> all(static_cast<std::size_t>(stack.n()));
  for (int i = 0; i < stack.n(); ++i) all[static_cast<std::size_t>(i)] = i;
  return batch_grad(theta, stack, labels, hp, all);
}

// Central-difference gradient of an arbitrary scalar function of theta.
// Test oracle for the analytic gradient; also behind the gradcheck command.
inline Eigen::MatrixXd finite_diff_grad(
    const std::function<double(const Eigen::MatrixXd&)>& loss_fn,
    const Eigen::Ref<const Eigen::MatrixXd>& theta, double h = 1e-5) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: step must be > 0");
  Eigen::MatrixXd probe = theta;
  Eigen::MatrixXd grad(theta.rows(), theta.cols());
  for (Eigen::Index r = 0; r < theta.rows(); ++r) {
    for (Eigen::Index col = 0; col < theta.cols(); ++col) {
      const double saved = probe(r, col);
      probe(r, col) = saved + h;
      const double up = loss_fn(probe);
      probe(r, col) = saved - h;
      const double down = loss_fn(probe);
      probe(r, col) = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("finite_diff_grad: non-finite loss at entry (" +
                                 std::to_string(r) + "," + std::to_string(col) + ")");
      }
      grad(r, col) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

// Per-entry gradient magnitude bound 1 + gamma + (gamma/c) * e^alpha.
inline double grad_entry_bound(const HyperParams& hp, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("grad_entry_bound: need c >= 2");
  return 1.0 + hp.gamma + hp.gamma / static_cast<double>(num_classes) * std::exp(hp.alpha);
}

// Lipschitz constant sqrt(c*k) * (1 + gamma + (gamma/c) * e^alpha) of the
// loss as a function of theta.
inline double lipschitz_bound(int num_classes, int num_classifiers, const HyperParams& hp) {
  if (num_classifiers < 1) throw std::invalid_argument("lipschitz_bound: need k >= 1");
  return std::sqrt(static_cast<double>(num_classes) * static_cast<double>(num_classifiers)) *
         grad_entry_bound(hp, num_classes);
}

}  // namespace marginfuse
