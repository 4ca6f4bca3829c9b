#include "qaml/evolve.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qaml/errors.hpp"
#include "qaml/parallel.hpp"

namespace qaml {

namespace {

std::string genome_summary(const Eigen::VectorXd& g) {
  std::ostringstream os;
  os << "genome[" << g.size() << "] = [";
  for (long i = 0; i < std::min<long>(g.size(), 8); ++i) {
    if (i) os << ", ";
    os << g[i];
  }
  if (g.size() > 8) os << ", ...";
  os << "]";
  return os.str();
}

void evaluate_population(Population& population, const FitnessFn& fitness_fn,
                         int threads, long* evaluations) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!population[i].evaluated()) pending.push_back(i);
  }
  parallel_for(pending.size(), threads, [&](std::size_t p) {
    Individual& ind = population[pending[p]];
    ind.fitness = fitness_fn(ind.genome);
  });
  for (std::size_t i : pending) {
    if (!std::isfinite(population[i].fitness)) {
      throw EvalError("fitness_fn returned a non-finite value for " +
                      genome_summary(population[i].genome));
    }
  }
  if (evaluations) *evaluations += long(pending.size());
}

// Indices of the population sorted by fitness descending, index ascending.
std::vector<std::size_t> ranked_indices(const Population& population) {
  std::vector<std::size_t> idx(population.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return population[a].fitness > population[b].fitness;
  });
  return idx;
}

// Order-insensitive fingerprint of the top-10 genome set.
std::vector<Eigen::VectorXd> top10_genomes(const Population& population) {
  const auto idx = ranked_indices(population);
  std::vector<Eigen::VectorXd> g;
  for (std::size_t i = 0; i < std::min<std::size_t>(10, idx.size()); ++i) {
    g.push_back(population[idx[i]].genome);
  }
  std::sort(g.begin(), g.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                        b.data(), b.data() + b.size());
  });
  return g;
}

bool same_genomes(const std::vector<Eigen::VectorXd>& a,
                  const std::vector<Eigen::VectorXd>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

void GaConfig::validate() const {
  if (population_size < 2) {
    throw std::invalid_argument("ga: population_size must be >= 2");
  }
  if (elite_k < 1 || elite_k > population_size) {
    throw std::invalid_argument("ga: elite_k must be in [1, population_size]");
  }
  if (mutation_rate < 0 || mutation_rate > 1 || mutation_fraction < 0 ||
      mutation_fraction > 1) {
    throw std::invalid_argument("ga: rates and fractions live in [0, 1]");
  }
  if (mutation_sigma < 0) {
    throw std::invalid_argument("ga: mutation_sigma must be >= 0");
  }
  if (max_iters < 1) throw std::invalid_argument("ga: max_iters must be >= 1");
  if (stagnation_window < 1) {
    throw std::invalid_argument("ga: stagnation_window must be >= 1");
  }
  if (bounds_lo.size() == 0 || bounds_lo.size() != bounds_hi.size()) {
    throw std::invalid_argument("ga: bounds must be non-empty and same-sized");
  }
  for (long g = 0; g < bounds_lo.size(); ++g) {
    if (!(bounds_lo[g] <= bounds_hi[g])) {
      throw std::invalid_argument("ga: bounds_lo must be <= bounds_hi");
    }
  }
}

GaConfig GaConfig::with_uniform_bounds(long genes, double lo, double hi) {
  GaConfig cfg;
  cfg.bounds_lo = Eigen::VectorXd::Constant(genes, lo);
  cfg.bounds_hi = Eigen::VectorXd::Constant(genes, hi);
  return cfg;
}

Population init_population(const GaConfig& config, const GaInit& init) {
  config.validate();
  const long genes = config.genome_length();
  SplitMix64 rng(seed_for(config.seed, "ga-init"));
  Population pop(std::size_t(config.population_size));

  if (init.kind == GaInit::Kind::SeededFrom) {
    if (init.genome.size() != genes) {
      throw std::invalid_argument("ga: seed genome length mismatch");
    }
  }

  for (std::size_t i = 0; i < pop.size(); ++i) {
    Eigen::VectorXd g(genes);
    if (init.kind == GaInit::Kind::UniformBounds) {
      for (long j = 0; j < genes; ++j) {
        g[j] = rng.uniform(config.bounds_lo[j], config.bounds_hi[j]);
      }
    } else if (i == 0) {
      g = init.genome;  // exact warm start survives at index 0
    } else {
      for (long j = 0; j < genes; ++j) {
        const double v = init.genome[j] + config.mutation_sigma * rng.normal();
        g[j] = std::clamp(v, config.bounds_lo[j], config.bounds_hi[j]);
      }
    }
    pop[i].genome = std::move(g);
  }
  return pop;
}

Population top_candidates(const Population& population, int k,
                          const FitnessFn& fitness_fn, int threads,
                          long* evaluations) {
  if (k < 0 || std::size_t(k) > population.size()) {
    throw std::invalid_argument("top_candidates: k out of range");
  }
  Population scored = population;
  evaluate_population(scored, fitness_fn, threads, evaluations);
  const auto idx = ranked_indices(scored);
  Population top;
  top.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i) top.push_back(scored[idx[std::size_t(i)]]);
  return top;
}

Population crossover(const Population& parents, int n, SplitMix64& rng) {
  if (long(parents.size()) > n) {
    throw std::invalid_argument("crossover: more parents than target size");
  }
  Population out = parents;
  const long n_children = n - long(parents.size());
  if (n_children == 0) return out;
  if (parents.size() < 2) {
    throw std::invalid_argument("crossover: need at least two parents");
  }

  Population children;
  while (long(children.size()) < n_children) {
    // Distinct pair, uniform without replacement.
    const std::size_t a = std::size_t(rng.below(parents.size()));
    std::size_t b = std::size_t(rng.below(parents.size() - 1));
    if (b >= a) ++b;

    Individual c0, c1;
    c0.genome = parents[a].genome;
    c1.genome = parents[b].genome;
    for (long gidx = 0; gidx < c0.genome.size(); ++gidx) {
      if (rng.next() & 1) std::swap(c0.genome[gidx], c1.genome[gidx]);
    }
    children.push_back(std::move(c0));
    children.push_back(std::move(c1));
  }
  children.resize(std::size_t(n_children));  // odd surplus dropped
  for (auto& c : children) out.push_back(std::move(c));
  return out;
}

void mutate(Population& population, const GaConfig& config, SplitMix64& rng) {
  // Elitism: the best evaluated individual keeps its genome.
  long protect = -1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (population[i].evaluated() && population[i].fitness > best) {
      best = population[i].fitness;
      protect = long(i);
    }
  }

  const long genes = config.genome_length();
  const long n_mutate = std::llround(config.mutation_fraction * double(genes));
  std::vector<long> gene_idx(static_cast<std::size_t>(genes), 0L);

  for (std::size_t i = 0; i < population.size(); ++i) {
    if (long(i) == protect) continue;
    if (rng.uniform() >= config.mutation_rate) continue;
    if (n_mutate == 0 || config.mutation_sigma == 0.0) {
      // Draw nothing extra: zero-width mutation keeps the genome intact
      // without disturbing the stream consumed by other individuals.
      continue;
    }
    Individual& ind = population[i];
    std::iota(gene_idx.begin(), gene_idx.end(), 0);
    // Partial Fisher-Yates: first n_mutate slots become the sample.
    for (long j = 0; j < n_mutate; ++j) {
      const long pick = j + long(rng.below(uint64_t(genes - j)));
      std::swap(gene_idx[std::size_t(j)], gene_idx[std::size_t(pick)]);
      const long g = gene_idx[std::size_t(j)];
      const double v = ind.genome[g] + config.mutation_sigma * rng.normal();
      ind.genome[g] = std::clamp(v, config.bounds_lo[g], config.bounds_hi[g]);
    }
    ind.fitness = std::numeric_limits<double>::quiet_NaN();  // needs re-eval
  }
}

GaResult run_ga(const GaConfig& config, const FitnessFn& fitness_fn,
                const GaInit& init) {
  config.validate();
  GaResult result;

  Population pop = init_population(config, init);
  evaluate_population(pop, fitness_fn, config.threads,
                      &result.fitness_evaluations);

  auto record_generation = [&](int gen) {
    GenerationStats st;
    st.generation = gen;
    st.best = -std::numeric_limits<double>::infinity();
    double sum = 0.0, sq = 0.0;
    for (const auto& ind : pop) {
      st.best = std::max(st.best, ind.fitness);
      sum += ind.fitness;
      sq += ind.fitness * ind.fitness;
    }
    const double n = double(pop.size());
    st.mean = sum / n;
    st.stddev = std::sqrt(std::max(0.0, sq / n - st.mean * st.mean));
    result.history.push_back(st);
    const auto idx = ranked_indices(pop);
    const Individual& top = pop[idx[0]];
    if (!result.best.evaluated() || top.fitness > result.best.fitness) {
      result.best = top;
    }
  };

  record_generation(0);
  std::vector<Eigen::VectorXd> prev_top10 = top10_genomes(pop);
  int unchanged = 0;

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    SplitMix64 rng(seed_for(seed_for(config.seed, "ga-gen"), uint64_t(iter)));

    Population parents = top_candidates(pop, config.elite_k, fitness_fn,
                                        config.threads,
                                        &result.fitness_evaluations);
    pop = crossover(parents, config.population_size, rng);
    mutate(pop, config, rng);
    for (auto& ind : pop) {
      if (!ind.evaluated()) ind.birth_generation = iter;
    }
    evaluate_population(pop, fitness_fn, config.threads,
                        &result.fitness_evaluations);

    record_generation(iter);
    result.generations = iter;

    const auto top10 = top10_genomes(pop);
    unchanged = same_genomes(top10, prev_top10) ? unchanged + 1 : 0;
    prev_top10 = top10;
    if (unchanged >= config.stagnation_window) {
      result.stagnated = true;
      break;
    }
  }

  result.population = std::move(pop);
  return result;
}

}  // namespace qaml
