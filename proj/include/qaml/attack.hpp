#pragma once

#include <functional>

#include <Eigen/Dense>

#include "qaml/evolve.hpp"
#include "qaml/image.hpp"

namespace qaml {

// Black-box classifier handle: image in [0,1] -> class probability vector.
// The attack touches the model through this and nothing else.
using ClassifierFn = std::function<Eigen::VectorXd(const ImageTensor&)>;

struct AttackConfig {
  // Class the attack tries to force. Negative = untargeted: the strongest
  // wrong class of the classifier's output on the seed image is chosen.
  int target_class = -1;
  double w0 = 1.0;  // weight on adversarial probability
  double w1 = 1.0;  // weight on normalized RMSE
  GaConfig ga;      // genome bounds are set internally to the 0-255 scale

  void validate() const;  // throws std::invalid_argument
};

struct AdversarialResult {
  ImageTensor adversarial;
  ImageTensor seed_image;
  int seed_label = 0;
  int target_class = 0;      // resolved y_adv
  int predicted_class = 0;   // classifier argmax on the adversarial image
  bool success = false;      // predicted_class == target_class
  double fitness = 0.0;      // w0 * p_adv - w1 * rmse / 255
  double p_adv = 0.0;        // classifier probability of target_class
  double rmse = 0.0;         // 0-255 pixel scale
  double avg_pixel_perturbation = 0.0;  // mean |delta| / 255
  int generations_used = 0;
  bool stagnated = false;
  long classifier_calls = 0;
  std::vector<GenerationStats> history;
};

// Root mean squared per-pixel difference on the 0-255 scale.
double rmse255(const ImageTensor& a, const ImageTensor& b);

// Mean absolute per-pixel difference as a fraction of full scale.
double perturbation_fraction(const ImageTensor& a, const ImageTensor& b);

// Eq. fitness: w0 * p_adv - w1 * rmse / 255. The normalization keeps both
// terms O(1) so the standard weight settings stay meaningful.
double attack_fitness(double p_adv, double rmse, double w0, double w1);

// Runs the genetic attack against `classifier` starting from `seed_image`
// with known label `seed_label`. Genomes live on the 0-255 pixel scale and
// are initialized uniformly at random. Classifier exceptions propagate.
// Throws std::invalid_argument when the resolved target equals seed_label
// or the config is inconsistent.
AdversarialResult generate_adversarial(const ImageTensor& seed_image,
                                       int seed_label,
                                       const ClassifierFn& classifier,
                                       const AttackConfig& config);

}  // namespace qaml
