#include "qaml/attack.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qaml {

namespace {

void check_same_dims(const ImageTensor& a, const ImageTensor& b,
                     const char* who) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument(std::string(who) +
                                ": image dimensions differ");
  }
}

ImageTensor tensor_from_genome(const Eigen::VectorXd& genome, int height,
                               int width) {
  return ImageTensor::from_flat(genome / 255.0, height, width);
}

}  // namespace

void AttackConfig::validate() const {
  if (w0 < 0.0 || w1 < 0.0) {
    throw std::invalid_argument("attack: fitness weights must be >= 0");
  }
}

double rmse255(const ImageTensor& a, const ImageTensor& b) {
  check_same_dims(a, b, "rmse255");
  if (a.pixels() == 0) throw std::invalid_argument("rmse255: empty image");
  const double mse =
      (255.0 * (a.values - b.values)).array().square().mean();
  return std::sqrt(mse);
}

double perturbation_fraction(const ImageTensor& a, const ImageTensor& b) {
  check_same_dims(a, b, "perturbation_fraction");
  if (a.pixels() == 0) {
    throw std::invalid_argument("perturbation_fraction: empty image");
  }
  return (a.values - b.values).array().abs().mean();
}

double attack_fitness(double p_adv, double rmse, double w0, double w1) {
  return w0 * p_adv - w1 * rmse / 255.0;
}

AdversarialResult generate_adversarial(const ImageTensor& seed_image,
                                       int seed_label,
                                       const ClassifierFn& classifier,
                                       const AttackConfig& config) {
  config.validate();
  if (seed_image.pixels() == 0) {
    throw std::invalid_argument("attack: empty seed image");
  }
  if (!classifier) {
    throw std::invalid_argument("attack: classifier handle is empty");
  }

  std::atomic<long> calls{0};
  auto score = [&](const ImageTensor& img) {
    ++calls;
    return classifier(img);
  };

  // Resolve the target: explicit class, or the strongest wrong class in
  // the classifier's view of the seed.
  int target = config.target_class;
  const Eigen::VectorXd seed_probs = score(seed_image);
  if (target < 0) {
    target = -1;
    for (int c = 0; c < seed_probs.size(); ++c) {
      if (c == seed_label) continue;
      if (target < 0 || seed_probs[c] > seed_probs[target]) target = c;
    }
  }
  if (target < 0 || target >= seed_probs.size()) {
    throw std::invalid_argument("attack: target class out of range");
  }
  if (target == seed_label) {
    throw std::invalid_argument(
        "attack: target class equals the seed image's label");
  }

  const Eigen::VectorXd seed_scale = 255.0 * seed_image.flatten();
  GaConfig ga = config.ga;
  ga.bounds_lo = Eigen::VectorXd::Zero(seed_image.pixels());
  ga.bounds_hi = Eigen::VectorXd::Constant(seed_image.pixels(), 255.0);

  const FitnessFn fitness_fn = [&](const Eigen::VectorXd& genome) {
    const ImageTensor candidate =
        tensor_from_genome(genome, seed_image.height, seed_image.width);
    const double p_adv = score(candidate)[target];
    const double rmse =
        std::sqrt((genome - seed_scale).array().square().mean());
    return attack_fitness(p_adv, rmse, config.w0, config.w1);
  };

  const GaResult ga_result = run_ga(ga, fitness_fn);

  AdversarialResult result;
  result.seed_image = seed_image;
  result.seed_label = seed_label;
  result.target_class = target;
  result.adversarial = tensor_from_genome(ga_result.best.genome,
                                          seed_image.height,
                                          seed_image.width);
  result.rmse = rmse255(result.adversarial, seed_image);
  result.avg_pixel_perturbation =
      perturbation_fraction(result.adversarial, seed_image);

  const Eigen::VectorXd final_probs = score(result.adversarial);
  result.p_adv = final_probs[target];
  result.fitness =
      attack_fitness(result.p_adv, result.rmse, config.w0, config.w1);
  result.predicted_class = 0;
  for (int c = 1; c < final_probs.size(); ++c) {
    if (final_probs[c] > final_probs[result.predicted_class]) {
      result.predicted_class = c;
    }
  }
  result.success = result.predicted_class == target;
  result.generations_used = ga_result.generations;
  result.stagnated = ga_result.stagnated;
  result.classifier_calls = calls.load();
  result.history = ga_result.history;
  return result;
}

}  // namespace qaml
