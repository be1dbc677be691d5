#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "marginfuse/types.hpp"

// Fusion of k one-hot base-classifier votes through a c x k confidence
// matrix theta. Row j of theta weights each classifier's vote for class j;
// the fused score vector is the diagonal of theta * g, passed through a
// softmax. All functions are pure.

namespace marginfuse {

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> one_hot(int label, int num_classes) {
  if (label < 0 || label >= num_classes) {
    throw std::invalid_argument("one_hot: label out of range");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(num_classes);
  v(label) = Scalar(1);
  return v;
}

// Class scores z with z_j = sum_l theta(j,l) * g(l,j), i.e. the diagonal of
// theta * g. g is a k x c matrix whose rows are one-hot votes.
template <typename DerivedTheta, typename DerivedG>
Eigen::Matrix<typename DerivedTheta::Scalar, Eigen::Dynamic, 1> class_scores(
    const Eigen::MatrixBase<DerivedTheta>& theta, const Eigen::MatrixBase<DerivedG>& g) {
  if (theta.cols() != g.rows() || theta.rows() != g.cols()) {
    throw std::invalid_argument("class_scores: theta is c x k but g is not k x c");
  }
  return theta.cwiseProduct(g.transpose()).rowwise().sum();
}

// Vote-indexed overload: preds(l) is the class predicted by classifier l.
inline Eigen::VectorXd class_scores(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                    const Eigen::Ref<const Eigen::RowVectorXi>& preds) {
  if (theta.cols() != preds.size()) {
    throw std::invalid_argument("class_scores: classifier count mismatch");
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(theta.rows());
  for (Eigen::Index l = 0; l < preds.size(); ++l) {
    const int p = preds(l);
    if (p < 0 || p >= theta.rows()) {
      throw std::invalid_argument("class_scores: prediction outside 0..c-1");
    }
    z(p) += theta(p, l);
  }
  return z;
}

// Max-subtracted softmax; the result is positive and sums to 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = z;
  if (!v.allFinite()) throw std::invalid_argument("softmax: non-finite input");
  const Scalar zmax = v.maxCoeff();
  v = (v.array() - zmax).exp();
  return v / v.sum();
}

// Lowest class index attaining the maximum.
template <typename Derived>
int argmax_lowest(const Eigen::MatrixBase<Derived>& v) {
  int best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (v(j) > v(best)) best = static_cast<int>(j);
  }
  return best;
}

// Fused prediction: argmax of softmax(class_scores). Softmax is monotone,
// so this is the argmax of the scores themselves; ties go to the lowest
// class index.
template <typename DerivedTheta, typename DerivedG>
int ensemble_predict(const Eigen::MatrixBase<DerivedTheta>& theta,
                     const Eigen::MatrixBase<DerivedG>& g) {
  return argmax_lowest(class_scores(theta, g));
}

inline int ensemble_predict(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                            const Eigen::Ref<const Eigen::RowVectorXi>& preds) {
  return argmax_lowest(class_scores(theta, preds));
}

}  // namespace marginfuse
