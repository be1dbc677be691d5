#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "marginfuse/forest.hpp"
#include "marginfuse/optimizer.hpp"
#include "marginfuse/types.hpp"

namespace marginfuse {

// A trained fusion model: the confidence matrix, the label dictionary, and
// (unless it was learned over an imported prediction stack) the base
// forest. Serialized as JSON with shortest round-trip numerics, so
// save/load is bit-exact and identical models produce identical bytes.
struct Model {
  int c = 0;
  int k = 0;
  int feature_count = 0;
  Eigen::MatrixXd theta;
  LabelDict labels;
  HyperParams hp;
  std::optional<ForestModel> forest;  // empty for stack-trained models

  // training provenance
  int epochs_run = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  bool converged = false;
};

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace marginfuse
