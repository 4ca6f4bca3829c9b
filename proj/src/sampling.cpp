#include "qaml/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "qaml/rng.hpp"

namespace qaml {

std::vector<long> sample_counts(const Eigen::VectorXd& probabilities,
                                long shots, uint64_t seed) {
  if (shots <= 0) throw std::invalid_argument("sample_counts: shots == 0");
  const Eigen::Index k = probabilities.size();
  if (k == 0) throw std::invalid_argument("sample_counts: empty distribution");
  if (probabilities.minCoeff() < 0.0)
    throw std::invalid_argument("sample_counts: negative probability");
  if (std::abs(probabilities.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("sample_counts: probabilities do not sum to 1");

  Eigen::VectorXd cdf(k);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    acc += probabilities[i];
    cdf[i] = acc;
  }
  cdf[k - 1] = 1.0;

  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  SplitMix64 rng(seed);
  for (long s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    Eigen::Index lo = 0, hi = k - 1;
    while (lo < hi) {
      Eigen::Index mid = (lo + hi) / 2;
      if (u < cdf[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    ++counts[static_cast<std::size_t>(lo)];
  }
  return counts;
}

}  // namespace qaml
