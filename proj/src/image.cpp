#include "qaml/image.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "qaml/errors.hpp"
#include "qaml/rng.hpp"

namespace qaml {

Eigen::VectorXd ImageTensor::flatten() const {
  Eigen::VectorXd flat(pixels());
  long k = 0;
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j) flat[k++] = values(i, j);
  return flat;
}

ImageTensor ImageTensor::from_flat(const Eigen::VectorXd& flat, int h, int w) {
  if (flat.size() != static_cast<long>(h) * w)
    throw std::invalid_argument("ImageTensor::from_flat: size mismatch");
  ImageTensor img(h, w);
  long k = 0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) img.values(i, j) = flat[k++];
  return img;
}

int LabeledDataset::digit_of(int class_index) const {
  for (const auto& [digit, cls] : class_map)
    if (cls == class_index) return digit;
  throw std::invalid_argument("digit_of: unknown class index");
}

LabeledDataset subset(const LabeledDataset& dataset,
                      const std::set<int>& digits,
                      std::optional<int> per_class_cap, uint64_t seed) {
  if (digits.empty())
    throw std::invalid_argument("subset: empty digit set");

  // Ascending digit order fixes the class remapping.
  std::map<int, int> remap;
  int next = 0;
  for (int d : digits) remap[d] = next++;

  // Class index -> original digit for the input dataset.
  std::map<int, int> inverse;
  for (const auto& [digit, cls] : dataset.class_map) inverse[cls] = digit;

  std::vector<std::size_t> picked;
  std::map<int, int> taken;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int digit = inverse.count(dataset.labels[i])
                          ? inverse.at(dataset.labels[i])
                          : dataset.labels[i];
    if (!remap.count(digit)) continue;
    if (per_class_cap && taken[digit] >= *per_class_cap) continue;
    ++taken[digit];
    picked.push_back(i);
  }
  if (picked.empty()) throw EvalError("subset: no samples match the digit set");

  // Deterministic Fisher-Yates shuffle.
  SplitMix64 rng(seed);
  for (std::size_t i = picked.size(); i > 1; --i)
    std::swap(picked[i - 1], picked[rng.below(i)]);

  LabeledDataset out;
  out.class_map = remap;
  out.images.reserve(picked.size());
  out.labels.reserve(picked.size());
  for (std::size_t i : picked) {
    const int digit = inverse.count(dataset.labels[i])
                          ? inverse.at(dataset.labels[i])
                          : dataset.labels[i];
    out.images.push_back(dataset.images[i]);
    out.labels.push_back(remap.at(digit));
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_at(const LabeledDataset& d,
                                                   std::size_t n) {
  n = std::min(n, d.size());
  LabeledDataset head, tail;
  head.class_map = tail.class_map = d.class_map;
  head.images.assign(d.images.begin(), d.images.begin() + n);
  head.labels.assign(d.labels.begin(), d.labels.begin() + n);
  tail.images.assign(d.images.begin() + n, d.images.end());
  tail.labels.assign(d.labels.begin() + n, d.labels.end());
  return {std::move(head), std::move(tail)};
}

}  // namespace qaml
