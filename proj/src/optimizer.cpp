#include "marginfuse/optimizer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "marginfuse/loss.hpp"
#include "marginfuse/rng.hpp"

namespace marginfuse {

Eigen::MatrixXd init_theta(int num_classes, int num_classifiers, std::uint64_t seed) {
  if (num_classes < 2) throw std::invalid_argument("init_theta: need c >= 2");
  if (num_classifiers < 1) throw std::invalid_argument("init_theta: need k >= 1");
  Rng rng(seed);
  Eigen::MatrixXd theta(num_classes, num_classifiers);
  for (int j = 0; j < num_classes; ++j) {
    for (int l = 0; l < num_classifiers; ++l) {
      theta(j, l) = 1.0 + rng.uniform(-0.01, 0.01);
    }
  }
  return theta;
}

TrainReport train(const PredictionStack& stack, const Eigen::Ref<const Eigen::VectorXi>& labels,
                  const HyperParams& hp) {
  hp.validate();
  const int n = stack.n();
  if (n == 0) throw std::invalid_argument("train: empty prediction stack");
  if (labels.size() != n) throw std::invalid_argument("train: labels length != stack size");
  if (labels.size() > 0 && (labels.minCoeff() < 0 || labels.maxCoeff() >= stack.c())) {
    throw std::invalid_argument("train: label outside 0..c-1");
  }

  TrainReport report;
  report.theta = init_theta(stack.c(), stack.k(), hp.seed);
  report.initial_loss = batch_loss(report.theta, stack, labels, hp).total;
  if (!std::isfinite(report.initial_loss)) {
    throw std::runtime_error("train: non-finite loss before epoch 1");
  }

  // Separate stream from init_theta so the shuffle order never aliases the
  // initialization draws.
  Rng shuffle_rng(derive_seed(hp.seed, 0x5u));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  double prev = report.initial_loss;
  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (int start = 0, batch_idx = 0; start < n; start += hp.batch, ++batch_idx) {
      const int len = std::min(hp.batch, n - start);
      const std::vector<int> batch(order.begin() + start, order.begin() + start + len);
      const Eigen::MatrixXd grad = batch_grad(report.theta, stack, labels, hp, batch);
      if (!grad.allFinite()) {
        throw std::runtime_error("train: non-finite gradient at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_idx));
      }
      report.theta -= hp.lr * grad;
    }
    const double cur = batch_loss(report.theta, stack, labels, hp).total;
    if (!std::isfinite(cur)) {
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    report.loss_curve.push_back(cur);
    if (std::abs(cur - prev) < hp.tol) {
      report.converged = true;
      break;
    }
    prev = cur;
  }
  report.epochs_run = static_cast<int>(report.loss_curve.size());
  report.final_loss = report.loss_curve.empty() ? report.initial_loss : report.loss_curve.back();
  return report;
}

}  // namespace marginfuse
