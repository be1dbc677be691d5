#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "marginfuse/forest.hpp"
#include "marginfuse/types.hpp"

namespace marginfuse {

// Accuracy plus margin diagnostics. margin_mean/margin_min use the exact
// margin s_m - max2(s); margin_smooth_mean uses the logsumexp surrogate.
// assumption_rate is the fraction of samples whose fused prediction equals
// the true class, i.e. where the smoothing assumption holds.
struct EvalReport {
  double accuracy_pct = 0.0;
  int n = 0;
  std::vector<double> per_class_accuracy;
  double margin_mean = 0.0;
  double margin_min = 0.0;
  double margin_smooth_mean = 0.0;
  double frac_negative_margin = 0.0;
  double assumption_rate = 0.0;
};

double accuracy(const Eigen::Ref<const Eigen::VectorXi>& preds,
                const Eigen::Ref<const Eigen::VectorXi>& labels);

EvalReport margin_report(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                         const PredictionStack& stack,
                         const Eigen::Ref<const Eigen::VectorXi>& labels,
                         const HyperParams& hp);

nlohmann::json report_to_json(const EvalReport& report);

struct GridRow {
  double x = 0.0;
  double y = 0.0;
  int cls = 0;
};

// Fused predictions over an inclusive resolution x resolution lattice,
// x-major order. Requires a 2-feature forest.
std::vector<GridRow> boundary_grid(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                                   const ForestModel& forest,
                                   std::pair<double, double> x_range,
                                   std::pair<double, double> y_range, int resolution);

}  // namespace marginfuse
