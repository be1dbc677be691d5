#include "marginfuse/report.hpp"

#include <algorithm>
#include <stdexcept>

#include "marginfuse/ensemble.hpp"
#include "marginfuse/loss.hpp"

namespace marginfuse {

double accuracy(const Eigen::Ref<const Eigen::VectorXi>& preds,
                const Eigen::Ref<const Eigen::VectorXi>& labels) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("accuracy: prediction/label length mismatch");
  }
  if (preds.size() == 0) throw std::invalid_argument("accuracy: empty input");
  int correct = 0;
  for (Eigen::Index i = 0; i < preds.size(); ++i) {
    if (preds(i) == labels(i)) ++correct;
  }
  return 100.0 * correct / static_cast<double>(preds.size());
}

EvalReport margin_report(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                         const PredictionStack& stack,
                         const Eigen::Ref<const Eigen::VectorXi>& labels,
                         const HyperParams& hp) {
  const int n = stack.n();
  const int c = stack.c();
  if (n == 0) throw std::invalid_argument("margin_report: empty stack");
  if (labels.size() != n) {
    throw std::invalid_argument("margin_report: labels length != stack size");
  }
  if (theta.rows() != c || theta.cols() != stack.k()) {
    throw std::invalid_argument("margin_report: theta shape does not match stack");
  }

  EvalReport report;
  report.n = n;
  std::vector<int> class_total(static_cast<std::size_t>(c), 0);
  std::vector<int> class_correct(static_cast<std::size_t>(c), 0);
  int correct = 0;
  int negative = 0;
  double margin_sum = 0.0;
  double smooth_sum = 0.0;
  double margin_min = 1.0;

  for (int i = 0; i < n; ++i) {
    const int m = labels(i);
    const Eigen::VectorXd s = softmax(class_scores(theta, stack.sample(i)));
    const double margin = s(m) - max2_exact(s);
    margin_sum += margin;
    smooth_sum += s(m) - smooth_max2(s, m, hp.alpha);
    margin_min = std::min(margin_min, margin);
    if (margin < 0.0) ++negative;
    ++class_total[static_cast<std::size_t>(m)];
    if (argmax_lowest(s) == m) {
      ++correct;
      ++class_correct[static_cast<std::size_t>(m)];
    }
  }

  report.accuracy_pct = 100.0 * correct / static_cast<double>(n);
  report.assumption_rate = correct / static_cast<double>(n);
  report.margin_mean = margin_sum / n;
  report.margin_smooth_mean = smooth_sum / n;
  report.margin_min = margin_min;
  report.frac_negative_margin = negative / static_cast<double>(n);
  report.per_class_accuracy.resize(static_cast<std::size_t>(c), 0.0);
  for (int j = 0; j < c; ++j) {
    const int total = class_total[static_cast<std::size_t>(j)];
    report.per_class_accuracy[static_cast<std::size_t>(j)] =
        total == 0 ? 0.0 : 100.0 * class_correct[static_cast<std::size_t>(j)] / total;
  }
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  return nlohmann::json{{"accuracy_pct", report.accuracy_pct},
                        {"n", report.n},
                        {"per_class_accuracy", report.per_class_accuracy},
                        {"margin_mean", report.margin_mean},
                        {"margin_min", report.margin_min},
                        {"margin_smooth_mean", report.margin_smooth_mean},
                        {"frac_negative_margin", report.frac_negative_margin},
                        {"assumption_rate", report.assumption_rate}};
}

std::vector<GridRow> boundary_grid(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                   const ForestModel& forest,
                                   std::pair<double, double> x_range,
                                   std::pair<double, double> y_range, int resolution) {
  if (forest.feature_count != 2) {
    throw std::invalid_argument("boundary_grid: model must have exactly 2 features");
  }
  if (resolution < 2) throw std::invalid_argument("boundary_grid: resolution must be >= 2");
  if (theta.rows() != forest.c || theta.cols() != forest.k()) {
    throw std::invalid_argument("boundary_grid: theta shape does not match forest");
  }

  // Endpoint-exact lattice coordinates via interpolation.
  auto lerp = [resolution](double lo, double hi, int i) {
    const double t = static_cast<double>(i) / (resolution - 1);
    return lo * (1.0 - t) + hi * t;
  };

  std::vector<GridRow> rows;
  rows.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  Eigen::RowVectorXd point(2);
  Eigen::RowVectorXi votes(forest.k());
  for (int ix = 0; ix < resolution; ++ix) {
    point(0) = lerp(x_range.first, x_range.second, ix);
    for (int iy = 0; iy < resolution; ++iy) {
      point(1) = lerp(y_range.first, y_range.second, iy);
      for (int l = 0; l < forest.k(); ++l) {
        votes(l) = forest.trees[static_cast<std::size_t>(l)].predict(point);
      }
      rows.push_back({point(0), point(1), ensemble_predict(theta, votes)});
    }
  }
  return rows;
}

}  // namespace marginfuse
