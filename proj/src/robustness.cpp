#include "qaml/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qaml/errors.hpp"
#include "qaml/noise.hpp"
#include "qaml/parallel.hpp"
#include "qaml/rng.hpp"

namespace qaml {

namespace {

double log_binom(long n, long k) {
  return std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) -
         std::lgamma(double(n - k + 1));
}

// Top-two count indices, ties toward the lower index (matching argmax on
// the estimated probabilities).
void top_two_counts(const std::vector<long>& counts, long& k_a, long& k_b) {
  std::size_t a = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[a]) a = c;
  }
  std::size_t b = a == 0 ? 1 : 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (c == a) continue;
    if (counts[c] > counts[b]) b = c;
  }
  k_a = counts[a];
  k_b = counts[b];
}

}  // namespace

double min_robustness_fidelity(double p_a, double p_b) {
  if (!(p_a >= 0.0 && p_a <= 1.0) || !(p_b >= 0.0 && p_b <= 1.0)) {
    throw std::invalid_argument(
        "min_robustness_fidelity: probabilities must lie in [0, 1]");
  }
  if (p_a < p_b) {
    throw std::invalid_argument("min_robustness_fidelity: requires p_a >= p_b");
  }
  double radicand = 1.0 - p_b - p_a * (1.0 - 2.0 * p_b) +
                    2.0 * std::sqrt(p_a * p_b * (1.0 - p_a) * (1.0 - p_b));
  if (radicand < -1e-12) {
    throw EvalError("min_robustness_fidelity: radicand out of domain");
  }
  radicand = std::max(radicand, 0.0);
  return 0.5 * (1.0 + std::sqrt(radicand));
}

double depolarization_radius(double p, double p_a) {
  if (!(p >= 0.0) || p >= 1.0) {
    throw std::invalid_argument(
        "depolarization_radius: rate must lie in [0, 1)");
  }
  if (!(p_a > 0.0) || !(p_a < 1.0)) {
    throw EvalError(
        "depolarization_radius: top probability must lie inside (0, 1)");
  }
  if (p_a <= 0.5) return 0.0;  // negative radius = no guarantee
  return (p / (2.0 * (1.0 - p))) * (std::sqrt(p_a / (1.0 - p_a)) - 1.0);
}

double binomial_survival(long k, long n, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double sum = 0.0;
  for (long i = k; i <= n; ++i) {
    sum += std::exp(log_binom(n, i) + double(i) * std::log(p) +
                    double(n - i) * std::log1p(-p));
  }
  return std::min(sum, 1.0);
}

double binomial_cdf(long k, long n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  double sum = 0.0;
  for (long i = 0; i <= k; ++i) {
    sum += std::exp(log_binom(n, i) + double(i) * std::log(p) +
                    double(n - i) * std::log1p(-p));
  }
  return std::min(sum, 1.0);
}

double binomial_lower_bound(long k, long n, double level) {
  if (n < 1 || k < 0 || k > n) {
    throw std::invalid_argument("binomial_lower_bound: bad counts");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("binomial_lower_bound: level must be in (0,1)");
  }
  if (k == 0) return 0.0;
  const double alpha = 1.0 - level;
  // P(X >= k | p) grows with p; the bound is the p where it equals alpha.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_survival(k, n, mid) > alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

double binomial_upper_bound(long k, long n, double level) {
  if (n < 1 || k < 0 || k > n) {
    throw std::invalid_argument("binomial_upper_bound: bad counts");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("binomial_upper_bound: level must be in (0,1)");
  }
  if (k == n) return 1.0;
  const double alpha = 1.0 - level;
  // P(X <= k | p) falls with p; the bound is the p where it equals alpha.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_cdf(k, n, mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

ConfidenceBounds confidence_bounds(const std::vector<long>& shot_counts,
                                   long shots, double level) {
  if (shot_counts.size() < 2) {
    throw std::invalid_argument("confidence_bounds: need at least 2 classes");
  }
  long total = 0;
  for (const long c : shot_counts) {
    if (c < 0) throw std::invalid_argument("confidence_bounds: negative count");
    total += c;
  }
  if (total != shots || shots < 1) {
    throw std::invalid_argument("confidence_bounds: counts must sum to shots");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence_bounds: level must be in (0,1)");
  }
  long k_a = 0, k_b = 0;
  top_two_counts(shot_counts, k_a, k_b);
  ConfidenceBounds out;
  out.p_a_lower = binomial_lower_bound(k_a, shots, level);
  out.p_b_upper = binomial_upper_bound(k_b, shots, level);
  return out;
}

void certify_record(PredictionRecord& record, double depolarization,
                    double level) {
  if (record.probabilities.size() < 2) {
    throw std::invalid_argument("certify_record: record has no probabilities");
  }
  double p_a = record.p_a;
  double p_b = record.p_b;
  bool certified = true;
  if (!record.shot_counts.empty()) {
    const long shots = [&] {
      long total = 0;
      for (const long c : record.shot_counts) total += c;
      return total;
    }();
    const ConfidenceBounds bounds =
        confidence_bounds(record.shot_counts, shots, level);
    p_a = bounds.p_a_lower;
    p_b = bounds.p_b_upper;
    certified = p_a >= p_b;
  }
  record.has_certificate = true;
  record.certified = certified;
  if (!certified) {
    record.r_f = 0.0;  // uncertified sentinel
    record.r_dp = 0.0;
    return;
  }
  record.r_f = min_robustness_fidelity(p_a, p_b);
  // Cap p_a so a saturated classifier reports a large finite radius
  // instead of tripping the (0,1) domain requirement.
  const double p_a_capped = std::min(std::max(p_a, 1e-15), 1.0 - 1e-12);
  record.r_dp = depolarization_radius(depolarization, p_a_capped);
}

void certify_records(std::vector<PredictionRecord>& records,
                     double depolarization, double level, int threads) {
  parallel_for(static_cast<long>(records.size()), threads, [&](long i) {
    certify_record(records[std::size_t(i)], depolarization, level);
  });
}

double certified_accuracy(const std::vector<PredictionRecord>& records,
                          double epsilon) {
  if (records.empty()) {
    throw std::invalid_argument("certified_accuracy: no records");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("certified_accuracy: epsilon must be in [0,1]");
  }
  long hits = 0;
  for (const auto& r : records) {
    if (r.correct() && r.certified && r.r_f <= 1.0 - epsilon) ++hits;
  }
  return double(hits) / double(records.size());
}

CertificationSummary summarize_certification(
    const std::vector<PredictionRecord>& records) {
  CertificationSummary s;
  for (const auto& r : records) {
    if (r.certified) {
      ++s.certified;
      if (!r.correct()) ++s.certified_errors;
    } else {
      ++s.uncertified;
      if (!r.correct()) ++s.uncertified_errors;
    }
  }
  if (s.certified > 0) {
    s.certified_error_rate = double(s.certified_errors) / double(s.certified);
  }
  if (s.uncertified > 0) {
    s.uncertified_error_rate =
        double(s.uncertified_errors) / double(s.uncertified);
  }
  return s;
}

std::string certification_tsv(const std::vector<PredictionRecord>& records) {
  std::ostringstream out;
  out << "index\tp_a\tp_b\tr_f\tr_dp\tcertified\tcorrect\n";
  out.precision(10);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << i << '\t' << r.p_a << '\t' << r.p_b << '\t' << r.r_f << '\t'
        << r.r_dp << '\t' << (r.certified ? 1 : 0) << '\t'
        << (r.correct() ? 1 : 0) << '\n';
  }
  return out.str();
}

RobustnessCheck empirical_robustness_check(const DraModel& model,
                                           const Eigen::VectorXd& features,
                                           double depolarization,
                                           double radius, int trials,
                                           uint64_t seed) {
  if (radius < 0.0) {
    throw std::invalid_argument("empirical_robustness_check: radius < 0");
  }
  if (trials < 1) {
    throw std::invalid_argument("empirical_robustness_check: trials < 1");
  }
  if (!(depolarization >= 0.0) || depolarization >= 1.0) {
    throw std::invalid_argument(
        "empirical_robustness_check: depolarization must lie in [0, 1)");
  }

  // Canonical smoothing setup: a clean encoded state, one explicit
  // depolarizing channel, then the model's readout. Gate noise is folded
  // into `depolarization` by the caller.
  DraModel clean = model;
  clean.noise = NoiseModel{};
  clean.noise.readout_flip = model.noise.readout_flip;

  const QubitState rho = dra_encode(clean, features);
  const Eigen::Vector3d s = bloch_vector(rho);
  const NoiseChannel smoothing{ChannelKind::Depolarizing, depolarization};

  const auto decide = [&](const QubitState& state) {
    return argmax_class(dra_measure(clean, apply_channel(state, smoothing)));
  };

  RobustnessCheck check;
  check.base_prediction = decide(rho);

  SplitMix64 rng(seed_for(seed, "robust-check"));
  for (int t = 0; t < trials; ++t) {
    Eigen::Vector3d direction(rng.normal(), rng.normal(), rng.normal());
    const double norm = direction.norm();
    if (norm < 1e-12) continue;
    direction /= norm;
    // Uniform in the ball, with every fourth draw pinned to the boundary
    // where violations concentrate. Trace distance is half the Euclidean
    // Bloch distance, hence the factor 2.
    const double unit = (t % 4 == 3) ? 1.0 : std::cbrt(rng.uniform());
    const double distance = radius * unit * (1.0 - 1e-12);
    Eigen::Vector3d perturbed = s + 2.0 * distance * direction;
    if (perturbed.norm() > 1.0) perturbed /= perturbed.norm();

    const QubitState sigma = state_from_bloch(perturbed);
    const double actual = 0.5 * (perturbed - s).norm();
    check.max_sampled_distance = std::max(check.max_sampled_distance, actual);
    if (decide(sigma) != check.base_prediction) ++check.violations;
  }
  return check;
}

}  // namespace qaml
