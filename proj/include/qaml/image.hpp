#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace qaml {

// H x W grid of pixel intensities in [0, 1], normalized from raw 0-255
// bytes at ingestion.
struct ImageTensor {
  int height = 0;
  int width = 0;
  Eigen::MatrixXd values;  // (height x width), values(i, j) = row i, col j

  ImageTensor() = default;
  ImageTensor(int h, int w)
      : height(h), width(w), values(Eigen::MatrixXd::Zero(h, w)) {}

  // Row-major flattening, matching the IDX byte order.
  Eigen::VectorXd flatten() const;
  static ImageTensor from_flat(const Eigen::VectorXd& flat, int h, int w);

  long pixels() const { return static_cast<long>(height) * width; }
};

struct LabeledDataset {
  std::vector<ImageTensor> images;
  std::vector<int> labels;           // contiguous class indices
  std::map<int, int> class_map;      // original digit -> class index

  std::size_t size() const { return images.size(); }
  int num_classes() const { return static_cast<int>(class_map.size()); }
  // Class index -> original digit.
  int digit_of(int class_index) const;
};

// Retain only the requested digits, remap labels contiguously in ascending
// digit order, apply an optional per-class cap, shuffle deterministically.
// Input labels are original digit values. Throws EvalError when the result
// would be empty, std::invalid_argument for an empty digit set.
LabeledDataset subset(const LabeledDataset& dataset,
                      const std::set<int>& digits,
                      std::optional<int> per_class_cap, uint64_t seed);

// First n / remaining split, preserving order.
std::pair<LabeledDataset, LabeledDataset> split_at(const LabeledDataset& d,
                                                   std::size_t n);

}  // namespace qaml
