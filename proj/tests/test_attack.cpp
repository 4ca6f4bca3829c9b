#include "qaml/attack.hpp"

#include <atomic>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "qaml/errors.hpp"
#include "qaml/rng.hpp"

using namespace qaml;

namespace {

ImageTensor constant_image(int h, int w, double value) {
  ImageTensor img(h, w);
  img.values.setConstant(value);
  return img;
}

ImageTensor random_image(SplitMix64& rng, int h, int w) {
  ImageTensor img(h, w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) img.values(i, j) = rng.uniform();
  }
  return img;
}

// Smooth synthetic two-class scorer: class 1 probability rises with mean
// brightness through a logistic. Differentiable in spirit, but the attack
// only ever sees the output vector.
Eigen::VectorXd brightness_classifier(const ImageTensor& img) {
  const double mean = img.values.mean();
  const double p1 = 1.0 / (1.0 + std::exp(-12.0 * (mean - 0.5)));
  Eigen::VectorXd probs(2);
  probs << 1.0 - p1, p1;
  return probs;
}

GaConfig small_ga(uint64_t seed, int iters = 60) {
  GaConfig ga;
  ga.population_size = 30;
  ga.elite_k = 15;
  ga.max_iters = iters;
  ga.stagnation_window = 25;
  ga.mutation_sigma = 12.0;  // pixel scale
  ga.seed = seed;
  return ga;
}

}  // namespace

TEST_CASE("rmse255 examples and loop oracle") {
  const ImageTensor zeros = constant_image(4, 4, 0.0);
  const ImageTensor ones = constant_image(4, 4, 1.0);
  CHECK(rmse255(zeros, zeros) == 0.0);
  CHECK(rmse255(zeros, ones) == doctest::Approx(255.0));

  // One pixel off by full scale in a 28x28 image: 255 / sqrt(784).
  ImageTensor a = constant_image(28, 28, 0.0);
  ImageTensor b = a;
  b.values(13, 7) = 1.0;
  CHECK(rmse255(a, b) == doctest::Approx(255.0 / 28.0).epsilon(1e-12));

  // Plain-loop oracle on random pairs.
  SplitMix64 rng(seed_for(31, "attack-rmse"));
  for (int trial = 0; trial < 20; ++trial) {
    const ImageTensor x = random_image(rng, 5, 7);
    const ImageTensor y = random_image(rng, 5, 7);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 7; ++j) {
        const double d = 255.0 * (x.values(i, j) - y.values(i, j));
        sum += d * d;
      }
    }
    CHECK(rmse255(x, y) ==
          doctest::Approx(std::sqrt(sum / 35.0)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(rmse255(zeros, constant_image(3, 4, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("perturbation_fraction examples") {
  const ImageTensor zeros = constant_image(4, 4, 0.0);
  CHECK(perturbation_fraction(zeros, zeros) == 0.0);

  // Every pixel shifted by 25.5 on the raw scale = 0.1 of full range.
  CHECK(perturbation_fraction(zeros, constant_image(4, 4, 0.1)) ==
        doctest::Approx(0.1).epsilon(1e-12));

  // Extreme inversion: every pixel flips between the two ends.
  ImageTensor binary(2, 2);
  binary.values << 0, 1, 1, 0;
  ImageTensor inverted(2, 2);
  inverted.values << 1, 0, 0, 1;
  CHECK(perturbation_fraction(binary, inverted) == doctest::Approx(1.0));
}

TEST_CASE("attack_fitness decomposition") {
  CHECK(attack_fitness(0.7, 123.0, 1.0, 0.0) == doctest::Approx(0.7));
  CHECK(attack_fitness(0.4, 0.0, 1.0, 1.5) == doctest::Approx(0.4));
  // w0 = 0: the seed itself (zero RMSE) dominates everything else.
  CHECK(attack_fitness(1.0, 0.0, 0.0, 1.2) == 0.0);
  CHECK(attack_fitness(1.0, 10.0, 0.0, 1.2) < 0.0);
  CHECK(attack_fitness(0.5, 51.0, 1.0, 1.0) ==
        doctest::Approx(0.5 - 0.2).epsilon(1e-12));
}

TEST_CASE("constant classifier: immediate success and RMSE pressure") {
  // The classifier always answers class 1 with certainty, so fitness
  // reduces to the RMSE term and the GA walks back toward the seed.
  auto constant = [](const ImageTensor&) {
    Eigen::VectorXd p(2);
    p << 0.0, 1.0;
    return p;
  };
  const ImageTensor seed = constant_image(6, 6, 0.4);
  AttackConfig config;
  config.target_class = 1;
  config.w0 = 1.0;
  config.w1 = 2.0;
  config.ga = small_ga(40, 120);

  const AdversarialResult r = generate_adversarial(seed, 0, constant, config);
  CHECK(r.success);
  CHECK(r.predicted_class == 1);
  CHECK(r.p_adv == doctest::Approx(1.0));
  CHECK(r.target_class == 1);
  CHECK(r.generations_used >= 1);
  // A uniform random 0-255 genome sits ~120 RMSE from a mid-gray image;
  // the RMSE term must have pulled the winner well inside that.
  CHECK(r.rmse < 45.0);
  CHECK(r.avg_pixel_perturbation < 0.17);
  // Exact decomposition from the stored fields.
  CHECK(r.fitness ==
        attack_fitness(r.p_adv, r.rmse, config.w0, config.w1));
}

TEST_CASE("black-box contract: call accounting through a counting double") {
  std::atomic<long> calls{0};
  auto counted = [&](const ImageTensor& img) {
    ++calls;
    return brightness_classifier(img);
  };
  const ImageTensor seed = constant_image(6, 6, 0.2);
  AttackConfig config;
  config.target_class = 1;
  config.ga = small_ga(41, 30);

  const AdversarialResult r = generate_adversarial(seed, 0, counted, config);
  CHECK(r.classifier_calls == calls.load());
  CHECK(r.classifier_calls > config.ga.population_size);  // real work happened
  CHECK(r.history.size() == std::size_t(r.generations_used) + 1);
}

TEST_CASE("seeded reproducibility") {
  const ImageTensor seed = constant_image(6, 6, 0.25);
  AttackConfig config;
  config.target_class = 1;
  config.ga = small_ga(42, 40);

  const AdversarialResult a =
      generate_adversarial(seed, 0, brightness_classifier, config);
  const AdversarialResult b =
      generate_adversarial(seed, 0, brightness_classifier, config);
  CHECK(a.fitness == b.fitness);
  CHECK(a.rmse == b.rmse);
  CHECK(a.p_adv == b.p_adv);
  CHECK(a.classifier_calls == b.classifier_calls);
  CHECK(a.adversarial.values == b.adversarial.values);

  // Threads must not change the outcome.
  AttackConfig threaded = config;
  threaded.ga.threads = 4;
  const AdversarialResult c =
      generate_adversarial(seed, 0, brightness_classifier, threaded);
  CHECK(c.adversarial.values == a.adversarial.values);
  CHECK(c.fitness == a.fitness);
}

TEST_CASE("attack succeeds against the brightness classifier") {
  // Seed is dark (class 0); pushing pixels bright forces class 1.
  const ImageTensor seed = constant_image(6, 6, 0.15);
  AttackConfig config;
  config.target_class = 1;
  config.w0 = 1.0;
  config.w1 = 0.9;
  config.ga = small_ga(43, 150);

  const AdversarialResult r =
      generate_adversarial(seed, 0, brightness_classifier, config);
  CHECK(r.success);
  CHECK(r.p_adv > 0.5);
  CHECK(r.rmse > 0.0);
  CHECK(r.fitness ==
        attack_fitness(r.p_adv, r.rmse, config.w0, config.w1));
}

TEST_CASE("untargeted mode picks the strongest wrong class") {
  auto three_way = [](const ImageTensor&) {
    Eigen::VectorXd p(3);
    p << 0.5, 0.2, 0.3;
    return p;
  };
  const ImageTensor seed = constant_image(4, 4, 0.3);
  AttackConfig config;
  config.target_class = -1;  // untargeted
  config.ga = small_ga(44, 5);

  const AdversarialResult r = generate_adversarial(seed, 0, three_way, config);
  CHECK(r.target_class == 2);  // strongest class != seed label

  // Explicit target equal to the seed label is rejected.
  AttackConfig bad = config;
  bad.target_class = 0;
  CHECK_THROWS_AS(generate_adversarial(seed, 0, three_way, bad),
                  std::invalid_argument);
  bad.target_class = 7;
  CHECK_THROWS_AS(generate_adversarial(seed, 0, three_way, bad),
                  std::invalid_argument);
  bad.target_class = 1;
  bad.w1 = -0.5;
  CHECK_THROWS_AS(generate_adversarial(seed, 0, three_way, bad),
                  std::invalid_argument);
}

TEST_CASE("higher w1 yields smaller perturbations") {
  // Fixed seeds, three imperceptibility weights: mean RMSE must be
  // non-increasing as w1 grows.
  std::vector<double> mean_rmse;
  for (const double w1 : {0.9, 1.2, 1.5}) {
    double total = 0.0;
    for (const uint64_t seed_id : {101u, 102u, 103u}) {
      const ImageTensor seed = constant_image(6, 6, 0.2);
      AttackConfig config;
      config.target_class = 1;
      config.w0 = 1.0;
      config.w1 = w1;
      config.ga = small_ga(seed_id, 80);
      const AdversarialResult r =
          generate_adversarial(seed, 0, brightness_classifier, config);
      total += r.rmse;
    }
    mean_rmse.push_back(total / 3.0);
  }
  CHECK(mean_rmse[0] >= mean_rmse[1]);
  CHECK(mean_rmse[1] >= mean_rmse[2]);
}

TEST_CASE("classifier failures propagate") {
  auto broken = [](const ImageTensor&) -> Eigen::VectorXd {
    throw EvalError("scorer offline");
  };
  const ImageTensor seed = constant_image(4, 4, 0.5);
  AttackConfig config;
  config.target_class = 1;
  config.ga = small_ga(45, 5);
  CHECK_THROWS_AS(generate_adversarial(seed, 0, broken, config), EvalError);
}
