#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qaml/dra.hpp"
#include "qaml/records.hpp"

namespace qaml {

// Minimum robustness fidelity: the smallest state fidelity an adversary
// must maintain to be unable to change the decision, given the top-two
// class probabilities. 0.5 * (1 + sqrt(1 - p_b - p_a(1 - 2 p_b)
// + 2 sqrt(p_a p_b (1-p_a)(1-p_b)))).
// Throws std::invalid_argument for p_a < p_b or values outside [0,1];
// EvalError when the radicand dips below -1e-12 (numeric domain).
double min_robustness_fidelity(double p_a, double p_b);

// Depolarization robustness radius: trace-distance radius certified by a
// depolarizing channel of rate p around a decision taken with top
// probability p_a: (p / (2(1-p))) * (sqrt(p_a / (1-p_a)) - 1), clamped to 0
// for p_a <= 0.5 (no guarantee below the tie).
// Throws std::invalid_argument for p outside [0,1); EvalError for p_a
// outside the open interval (0,1).
double depolarization_radius(double p, double p_a);

// One-sided exact binomial bounds for a shot-sampled record: a lower
// confidence bound on the top class probability and an upper bound on the
// runner-up, each at `level`.
struct ConfidenceBounds {
  double p_a_lower = 0.0;
  double p_b_upper = 1.0;
};
ConfidenceBounds confidence_bounds(const std::vector<long>& shot_counts,
                                   long shots, double level);

// Exact binomial tail helpers (public for oracle-style verification).
double binomial_survival(long k, long n, double p);  // P(X >= k)
double binomial_cdf(long k, long n, double p);       // P(X <= k)
double binomial_lower_bound(long k, long n, double level);
double binomial_upper_bound(long k, long n, double level);

// Fills the certificate fields of a record. Exact-mode records (no shot
// counts) certify directly from (p_a, p_b); shot-mode records certify from
// the confidence bounds at `level` and stay uncertified (r_f = 0 sentinel)
// when the bounds overlap. r_dp uses the declared end-to-end depolarization
// rate, with p_a capped at 1 - 1e-12 so saturated classifiers report a
// finite radius.
void certify_record(PredictionRecord& record, double depolarization,
                    double level);
void certify_records(std::vector<PredictionRecord>& records,
                     double depolarization, double level, int threads = 1);

// Fraction of records that are correct, certified, and satisfy
// r_f <= 1 - epsilon. Records must have been through certify_record.
double certified_accuracy(const std::vector<PredictionRecord>& records,
                          double epsilon);

struct CertificationSummary {
  long certified = 0;
  long uncertified = 0;
  long certified_errors = 0;
  long uncertified_errors = 0;
  double certified_error_rate = 0.0;    // 0 when the group is empty
  double uncertified_error_rate = 0.0;
};
CertificationSummary summarize_certification(
    const std::vector<PredictionRecord>& records);

// One row per record: index, p_a, p_b, r_f, r_dp, certified, correct.
std::string certification_tsv(const std::vector<PredictionRecord>& records);

// Empirical validation of the depolarization certificate for a feature
// classifier: encodes `features` noiselessly, perturbs the encoded state
// uniformly within the trace-distance ball of `radius` (every fourth draw
// pinned to the boundary), pushes each perturbed state through the
// depolarizing channel and the model's readout, and counts decision
// changes.
struct RobustnessCheck {
  long violations = 0;
  int base_prediction = -1;
  double max_sampled_distance = 0.0;
};
RobustnessCheck empirical_robustness_check(const DraModel& model,
                                           const Eigen::VectorXd& features,
                                           double depolarization,
                                           double radius, int trials,
                                           uint64_t seed);

}  // namespace qaml
