#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace qaml {

// Multinomial shot sampling by CDF inversion. probabilities must sum to 1
// within 1e-9; counts sum to shots; deterministic for a fixed seed.
// Throws std::invalid_argument for shots == 0 or a bad distribution.
std::vector<long> sample_counts(const Eigen::VectorXd& probabilities,
                                long shots, uint64_t seed);

}  // namespace qaml
