#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace qaml {

// Per-sample evaluation output: the unit of certification and reporting.
// Classifier evaluation fills the probability/label fields; the robustness
// pass fills the certificate fields afterwards.
struct PredictionRecord {
  Eigen::VectorXd probabilities;  // per-class, renormalized
  std::vector<long> shot_counts;  // empty in exact mode
  int predicted = -1;
  int truth = -1;
  double p_a = 0.0;  // top probability
  double p_b = 0.0;  // runner-up

  // Certificate fields. r_f lives in [0.5, 1] when a certificate exists;
  // uncertified records keep the 0 sentinel (out of range, so unambiguous).
  bool has_certificate = false;
  bool certified = false;
  double r_f = 0.0;
  double r_dp = 0.0;

  bool correct() const { return predicted == truth; }
};

// Builds a record from exact class probabilities: in shot mode the
// probabilities become finite-shot estimates drawn on `stream_seed`;
// prediction and the top-two fields always reflect the stored
// probabilities.
PredictionRecord record_from_probs(const Eigen::VectorXd& exact_probs,
                                   int truth, std::optional<long> shots,
                                   uint64_t stream_seed);

struct Evaluation {
  double accuracy = 0.0;
  std::vector<PredictionRecord> records;
};

}  // namespace qaml
