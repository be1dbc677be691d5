#include "marginfuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "marginfuse/csv.hpp"
#include "marginfuse/rng.hpp"

namespace marginfuse {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Sorted-unique label order: numeric ascending when every observed label
// parses as a number (ties broken by text), lexicographic otherwise.
std::vector<std::string> sorted_label_names(const std::vector<std::string>& raw) {
  std::set<std::string> unique(raw.begin(), raw.end());
  std::vector<std::string> names(unique.begin(), unique.end());
  bool all_numeric = true;
  std::vector<double> parsed(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!parse_double(names[i], parsed[i])) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric) {
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (parsed[a] != parsed[b]) return parsed[a] < parsed[b];
      return names[a] < names[b];
    });
    std::vector<std::string> out(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) out[i] = names[order[i]];
    return out;
  }
  return names;  // std::set already sorted lexicographically
}

}  // namespace

EncodedDataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: empty file " + path);

  const int width = static_cast<int>(rows.front().size());
  if (width < 2) {
    throw std::runtime_error("load_csv: need at least one feature column and a label column");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != width) {
      throw std::runtime_error("load_csv: row " + std::to_string(r + 1) + " has " +
                               std::to_string(rows[r].size()) + " cells, expected " +
                               std::to_string(width));
    }
  }

  EncodedDataset ds;
  bool has_header = false;
  if (label_column == "last") {
    ds.label_col = width - 1;
    // Header iff any would-be feature cell of the first row is non-numeric.
    double ignored;
    for (int j = 0; j < width - 1; ++j) {
      if (!parse_double(rows[0][static_cast<std::size_t>(j)], ignored)) {
        has_header = true;
        break;
      }
    }
  } else {
    has_header = true;  // selecting a label column by name requires a header
    ds.label_col = -1;
    for (int j = 0; j < width; ++j) {
      if (rows[0][static_cast<std::size_t>(j)] == label_column) {
        ds.label_col = j;
        break;
      }
    }
    if (ds.label_col < 0) {
      throw std::runtime_error("load_csv: no column named '" + label_column + "'");
    }
  }
  if (has_header) {
    ds.column_names = rows.front();
    rows.erase(rows.begin());
    if (rows.empty()) throw std::runtime_error("load_csv: header but no data rows in " + path);
  }

  const int n = static_cast<int>(rows.size());
  const int d = width - 1;
  ds.features.resize(n, d);
  std::vector<std::string> raw_labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    int col = 0;
    for (int j = 0; j < width; ++j) {
      if (j == ds.label_col) continue;
      double v;
      if (!parse_double(row[static_cast<std::size_t>(j)], v) || !std::isfinite(v)) {
        throw std::runtime_error("load_csv: non-numeric feature at row " +
                                 std::to_string(i + 1 + (has_header ? 1 : 0)) + ", column " +
                                 std::to_string(j + 1) + ": '" +
                                 row[static_cast<std::size_t>(j)] + "'");
      }
      ds.features(i, col++) = v;
    }
    raw_labels[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(ds.label_col)];
  }

  ds.label_dict = LabelDict::from_names(sorted_label_names(raw_labels));
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.labels(i) = ds.label_dict.encode(raw_labels[static_cast<std::size_t>(i)]);
  }
  return ds;
}

std::pair<EncodedDataset, EncodedDataset> train_test_split(const EncodedDataset& ds,
                                                           double test_frac,
                                                           std::uint64_t seed) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw std::invalid_argument("train_test_split: test fraction must be in (0, 1)");
  }
  const int n = ds.n();
  const int test_n = static_cast<int>(std::floor(test_frac * n + 0.5));
  if (test_n == 0 || test_n == n) {
    throw std::invalid_argument("train_test_split: split would leave a partition empty");
  }

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<int> test_idx(perm.begin(), perm.begin() + test_n);
  std::vector<int> train_idx(perm.begin() + test_n, perm.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  auto take = [&](const std::vector<int>& idx) {
    EncodedDataset part;
    part.label_dict = ds.label_dict;
    part.column_names = ds.column_names;
    part.label_col = ds.label_col;
    part.features.resize(static_cast<int>(idx.size()), ds.d());
    part.labels.resize(static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      part.features.row(static_cast<int>(i)) = ds.features.row(idx[i]);
      part.labels(static_cast<int>(i)) = ds.labels(idx[i]);
    }
    return part;
  };
  return {take(train_idx), take(test_idx)};
}

EncodedDataset gen_moons(int n, double noise_sigma, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("gen_moons: n must be even and >= 2");
  if (noise_sigma < 0.0) throw std::invalid_argument("gen_moons: noise must be >= 0");

  EncodedDataset ds;
  ds.features.resize(n, 2);
  ds.labels.resize(n);
  ds.label_dict = LabelDict::from_names({"0", "1"});
  ds.column_names = {"x", "y", "label"};
  ds.label_col = 2;

  Rng rng(seed);
  const int half = n / 2;
  for (int i = 0; i < n; ++i) {
    const bool second = i >= half;
    const double t = rng.uniform(0.0, M_PI);
    const auto [nx, ny] = rng.gaussian_pair();
    const double x = second ? 1.0 - std::cos(t) : std::cos(t);
    const double y = second ? 0.5 - std::sin(t) : std::sin(t);
    ds.features(i, 0) = x + noise_sigma * nx;
    ds.features(i, 1) = y + noise_sigma * ny;
    ds.labels(i) = second ? 1 : 0;
  }
  return ds;
}

void write_csv(const EncodedDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path + " for writing");
  const int width = ds.d() + 1;
  const int label_col = ds.label_col >= 0 ? ds.label_col : ds.d();
  if (!ds.column_names.empty()) {
    for (int j = 0; j < width; ++j) {
      if (j) out << ',';
      out << ds.column_names[static_cast<std::size_t>(j)];
    }
    out << '\n';
  }
  for (int i = 0; i < ds.n(); ++i) {
    int col = 0;
    for (int j = 0; j < width; ++j) {
      if (j) out << ',';
      if (j == label_col) {
        out << ds.label_dict.decode(ds.labels(i));
      } else {
        out << format_double(ds.features(i, col++));
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: failed writing " + path);
}

}  // namespace marginfuse
