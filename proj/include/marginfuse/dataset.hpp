#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "marginfuse/types.hpp"

namespace marginfuse {

// Numeric feature matrix with integer-encoded labels. column_names and
// label_col remember the source layout so a split can be written back in
// the original column order.
struct EncodedDataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXi labels;    // n, values in 0..c-1
  LabelDict label_dict;
  std::vector<std::string> column_names;  // empty when the file had no header
  int label_col = -1;                     // label position in the source columns

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }
  int c() const { return label_dict.size(); }
};

// Loads a CSV with numeric feature columns and one label column, "last" by
// default or selected by header name. Labels are encoded in sorted order:
// ascending numerically when every label parses as a number, otherwise
// lexicographically. A header row is detected when any feature cell of the
// first row is non-numeric.
EncodedDataset load_csv(const std::string& path, const std::string& label_column = "last");

// Seeded uniform split. The test partition takes round-half-up(test_frac*n)
// samples; both sides keep the source row order and share the label
// dictionary.
std::pair<EncodedDataset, EncodedDataset> train_test_split(const EncodedDataset& ds,
                                                           double test_frac,
                                                           std::uint64_t seed);

// Two interleaved half-circle classes: class 0 at (cos t, sin t) and class 1
// at (1 - cos t, 0.5 - sin t) with t uniform on [0, pi], plus isotropic
// Gaussian noise. n/2 points per class, class 0 first.
EncodedDataset gen_moons(int n, double noise_sigma, std::uint64_t seed);

// Writes the dataset back out in its source column order (decoded labels).
// Feature cells use shortest round-trip formatting.
void write_csv(const EncodedDataset& ds, const std::string& path);

}  // namespace marginfuse
