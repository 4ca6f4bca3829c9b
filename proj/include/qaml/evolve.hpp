#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "qaml/rng.hpp"

namespace qaml {

// Generic genetic-algorithm engine over flat real genomes. Drives both
// classifier training and the adversarial generator, so everything here is
// agnostic to what a genome means.

struct Individual {
  Eigen::VectorXd genome;
  double fitness = std::numeric_limits<double>::quiet_NaN();  // NaN = not yet
  long birth_generation = 0;

  bool evaluated() const { return std::isfinite(fitness); }
};

using Population = std::vector<Individual>;
using FitnessFn = std::function<double(const Eigen::VectorXd&)>;

struct GaConfig {
  int population_size = 200;    // N
  int elite_k = 100;            // parents kept per generation
  double mutation_rate = 0.8;   // p_m, per individual
  double mutation_fraction = 0.1;  // share of genes perturbed
  double mutation_sigma = 1.0;  // pixel-scale genomes keep the unit normal
  int max_iters = 500;
  int stagnation_window = 20;   // I consecutive unchanged top-10 sets
  Eigen::VectorXd bounds_lo;    // per gene
  Eigen::VectorXd bounds_hi;
  uint64_t seed = 0;
  int threads = 1;

  long genome_length() const { return bounds_lo.size(); }
  void validate() const;  // throws std::invalid_argument

  static GaConfig with_uniform_bounds(long genes, double lo, double hi);
};

struct GaInit {
  enum class Kind { UniformBounds, SeededFrom };
  Kind kind = Kind::UniformBounds;
  // SeededFrom keeps one exact copy at index 0 and fills the rest with
  // sigma-scaled Gaussian perturbations, clamped to bounds.
  Eigen::VectorXd genome;

  static GaInit uniform() { return {}; }
  static GaInit seeded_from(Eigen::VectorXd g) {
    return {Kind::SeededFrom, std::move(g)};
  }
};

struct GenerationStats {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct GaResult {
  Individual best;                      // highest fitness ever seen
  std::vector<GenerationStats> history;  // one entry per generation
  Population population;                 // final generation, evaluated
  int generations = 0;
  bool stagnated = false;               // stopped by the top-10 rule
  long fitness_evaluations = 0;
};

Population init_population(const GaConfig& config, const GaInit& init);

// Evaluates any unevaluated individuals (cached fitness is kept), then
// returns the k best, descending, ties broken by lower population index.
// Throws EvalError when fitness_fn returns a non-finite value.
Population top_candidates(const Population& population, int k,
                          const FitnessFn& fitness_fn, int threads = 1,
                          long* evaluations = nullptr);

// Extends `parents` with Bernoulli(0.5) per-gene exchange children until
// the population is exactly n; an odd surplus child is dropped. Parents
// stay in front, unchanged.
Population crossover(const Population& parents, int n, SplitMix64& rng);

// Perturbs mutation_fraction of genes with N(0, sigma) noise, probability
// mutation_rate per individual, clamped to bounds. The best evaluated
// individual is exempt (elitism).
void mutate(Population& population, const GaConfig& config, SplitMix64& rng);

GaResult run_ga(const GaConfig& config, const FitnessFn& fitness_fn,
                const GaInit& init = GaInit::uniform());

}  // namespace qaml
