#include "qaml/records.hpp"

#include "qaml/sampling.hpp"

namespace qaml {

namespace {

void top_two(const Eigen::VectorXd& probs, double& p_a, double& p_b) {
  p_a = 0.0;
  p_b = 0.0;
  for (long c = 0; c < probs.size(); ++c) {
    if (probs[c] > p_a) {
      p_b = p_a;
      p_a = probs[c];
    } else if (probs[c] > p_b) {
      p_b = probs[c];
    }
  }
}

int argmax_of(const Eigen::VectorXd& probs) {
  int best = 0;
  for (int c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return best;
}

}  // namespace

PredictionRecord record_from_probs(const Eigen::VectorXd& exact_probs,
                                   int truth, std::optional<long> shots,
                                   uint64_t stream_seed) {
  PredictionRecord rec;
  rec.truth = truth;
  if (shots) {
    const auto counts = sample_counts(exact_probs, *shots, stream_seed);
    rec.shot_counts = counts;
    Eigen::VectorXd est(exact_probs.size());
    for (long c = 0; c < est.size(); ++c) {
      est[c] = double(counts[std::size_t(c)]) / double(*shots);
    }
    rec.probabilities = est;
  } else {
    rec.probabilities = exact_probs;
  }
  rec.predicted = argmax_of(rec.probabilities);
  top_two(rec.probabilities, rec.p_a, rec.p_b);
  return rec;
}

}  // namespace qaml
