#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "marginfuse/types.hpp"

namespace marginfuse {

struct TrainReport {
  int epochs_run = 0;
  std::vector<double> loss_curve;  // full-set mean loss after each epoch
  double initial_loss = 0.0;
  double final_loss = 0.0;
  bool converged = false;
  Eigen::MatrixXd theta;
};

// Seeded initialization near the all-ones matrix: entries 1 + u with u
// uniform in [-0.01, 0.01]. All-ones theta is plain plurality voting, so
// training starts from the majority-vote baseline.
Eigen::MatrixXd init_theta(int num_classes, int num_classifiers, std::uint64_t seed);

// Mini-batch gradient descent on the confidence matrix. Each epoch visits a
// seeded permutation of the samples split into batches of hp.batch (last one
// may be short) and steps theta against the batch-mean gradient. After every
// epoch the full-set mean loss is recorded; training stops once its absolute
// change falls below hp.tol or the epoch budget is exhausted. Deterministic
// for a fixed (stack, labels, hp).
TrainReport train(const PredictionStack& stack, const Eigen::Ref<const Eigen::VectorXi>& labels,
                  const HyperParams& hp);

}  // namespace marginfuse
