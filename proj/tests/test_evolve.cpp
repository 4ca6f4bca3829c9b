#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>

#include "qaml/errors.hpp"
#include "qaml/evolve.hpp"

using namespace qaml;

namespace {

GaConfig small_config(long genes, double lo, double hi) {
  GaConfig cfg = GaConfig::with_uniform_bounds(genes, lo, hi);
  cfg.population_size = 20;
  cfg.elite_k = 10;
  cfg.max_iters = 50;
  cfg.stagnation_window = 10;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("init: degenerate bounds give all-zero genomes") {
  GaConfig cfg = GaConfig::with_uniform_bounds(5, 0.0, 0.0);
  cfg.population_size = 3;
  cfg.elite_k = 2;
  const Population pop = init_population(cfg, GaInit::uniform());
  REQUIRE(pop.size() == 3);
  for (const auto& ind : pop) {
    CHECK(ind.genome.cwiseAbs().maxCoeff() == 0.0);
    CHECK(!ind.evaluated());
  }
}

TEST_CASE("init: same seed reproduces the population") {
  GaConfig cfg = small_config(8, -1, 1);
  const Population a = init_population(cfg, GaInit::uniform());
  const Population b = init_population(cfg, GaInit::uniform());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].genome == b[i].genome);
  }
  cfg.seed = 8;
  const Population c = init_population(cfg, GaInit::uniform());
  CHECK(a[0].genome != c[0].genome);
}

TEST_CASE("init: pixel-scale uniform sampling has the right mean") {
  GaConfig cfg = GaConfig::with_uniform_bounds(1000, 0.0, 255.0);
  cfg.population_size = 100;  // 1e5 genes pooled
  cfg.elite_k = 50;
  cfg.seed = 3;
  const Population pop = init_population(cfg, GaInit::uniform());
  double sum = 0.0;
  double lo = 1e9, hi = -1e9;
  for (const auto& ind : pop) {
    sum += ind.genome.sum();
    lo = std::min(lo, ind.genome.minCoeff());
    hi = std::max(hi, ind.genome.maxCoeff());
  }
  const double mean = sum / 1e5;
  // sigma of the pooled mean = 255/sqrt(12)/sqrt(1e5) ~ 0.233
  CHECK(std::abs(mean - 127.5) < 3 * 0.233);
  CHECK(lo >= 0.0);
  CHECK(hi <= 255.0);
}

TEST_CASE("init: seeded warm start keeps the exact genome at index 0") {
  GaConfig cfg = small_config(6, 0, 10);
  cfg.mutation_sigma = 0.5;
  Eigen::VectorXd seed_genome(6);
  seed_genome << 1, 2, 3, 4, 5, 6;
  const Population pop = init_population(cfg, GaInit::seeded_from(seed_genome));
  CHECK(pop[0].genome == seed_genome);
  bool any_moved = false;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    any_moved |= pop[i].genome != seed_genome;
    CHECK(pop[i].genome.minCoeff() >= 0.0);
    CHECK(pop[i].genome.maxCoeff() <= 10.0);
  }
  CHECK(any_moved);
  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(init_population(cfg, GaInit::seeded_from(wrong)),
                  std::invalid_argument);
}

TEST_CASE("top_candidates ranks by fitness with index tie breaks") {
  Population pop(3);
  for (int i = 0; i < 3; ++i) pop[std::size_t(i)].genome = Eigen::VectorXd::Constant(1, i);
  // fitness by genome value: [1, 3, 2] pattern
  const FitnessFn fn = [](const Eigen::VectorXd& g) {
    const double v = g[0];
    return v == 0 ? 1.0 : (v == 1 ? 3.0 : 2.0);
  };
  const Population top1 = top_candidates(pop, 1, fn);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].genome[0] == 1.0);

  const Population all = top_candidates(pop, 3, fn);
  CHECK(all[0].fitness == 3.0);
  CHECK(all[1].fitness == 2.0);
  CHECK(all[2].fitness == 1.0);

  const FitnessFn flat = [](const Eigen::VectorXd&) { return 5.0; };
  const Population two = top_candidates(pop, 2, flat);
  CHECK(two[0].genome[0] == 0.0);  // first two by index
  CHECK(two[1].genome[0] == 1.0);

  CHECK_THROWS_AS(top_candidates(pop, 4, fn), std::invalid_argument);
}

TEST_CASE("top_candidates caches fitness") {
  Population pop(5);
  for (auto& ind : pop) ind.genome = Eigen::VectorXd::Zero(2);
  std::atomic<int> calls{0};
  const FitnessFn fn = [&](const Eigen::VectorXd&) {
    ++calls;
    return 1.0;
  };
  Population scored = top_candidates(pop, 5, fn);
  CHECK(calls == 5);
  top_candidates(scored, 3, fn);  // all already evaluated
  CHECK(calls == 5);
}

TEST_CASE("crossover preserves values gene by gene") {
  SplitMix64 rng(99);
  Population parents(2);
  parents[0].genome = Eigen::VectorXd::Constant(12, 1.0);
  parents[0].fitness = 2.0;
  parents[1].genome = Eigen::VectorXd::Constant(12, 2.0);
  parents[1].fitness = 1.0;

  const Population out = crossover(parents, 8, rng);
  REQUIRE(out.size() == 8);
  // Parents first, unchanged, keeping their cached fitness.
  CHECK(out[0].genome == parents[0].genome);
  CHECK(out[0].fitness == 2.0);
  CHECK(out[1].genome == parents[1].genome);

  for (std::size_t c = 2; c < 8; c += 2) {
    for (long g = 0; g < 12; ++g) {
      const std::multiset<double> pair{out[c].genome[g], out[c + 1].genome[g]};
      CHECK(pair == std::multiset<double>({1.0, 2.0}));
    }
    CHECK(!out[c].evaluated());  // children need evaluation
  }
}

TEST_CASE("crossover with identical parents clones them") {
  SplitMix64 rng(5);
  Population parents(2);
  parents[0].genome = Eigen::VectorXd::Constant(6, 3.5);
  parents[1].genome = Eigen::VectorXd::Constant(6, 3.5);
  const Population out = crossover(parents, 6, rng);
  for (const auto& ind : out) {
    CHECK(ind.genome == parents[0].genome);
  }
}

TEST_CASE("crossover drops the odd surplus child") {
  SplitMix64 rng(1);
  Population parents(2);
  parents[0].genome = Eigen::VectorXd::Zero(4);
  parents[1].genome = Eigen::VectorXd::Ones(4);
  const Population out = crossover(parents, 5, rng);  // 3 children wanted
  CHECK(out.size() == 5);

  Population one(1);
  one[0].genome = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(crossover(one, 5, rng), std::invalid_argument);
  CHECK(crossover(one, 1, rng).size() == 1);  // nothing to breed
}

TEST_CASE("mutate honors rate, sigma, bounds and elitism") {
  GaConfig cfg = small_config(100, -2, 2);
  cfg.mutation_fraction = 0.1;

  auto fresh_population = [&] {
    Population pop(6);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      pop[i].genome = Eigen::VectorXd::Constant(100, double(i) * 0.01);
      pop[i].fitness = double(i);  // last one is best
    }
    return pop;
  };

  SUBCASE("zero rate leaves everything alone") {
    cfg.mutation_rate = 0.0;
    Population pop = fresh_population();
    const Population before = pop;
    SplitMix64 rng(4);
    mutate(pop, cfg, rng);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      CHECK(pop[i].genome == before[i].genome);
    }
  }
  SUBCASE("zero sigma leaves everything alone") {
    cfg.mutation_rate = 1.0;
    cfg.mutation_sigma = 0.0;
    Population pop = fresh_population();
    const Population before = pop;
    SplitMix64 rng(4);
    mutate(pop, cfg, rng);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      CHECK(pop[i].genome == before[i].genome);
    }
  }
  SUBCASE("best individual is exempt across seeds") {
    cfg.mutation_rate = 1.0;
    cfg.mutation_sigma = 1.0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
      Population pop = fresh_population();
      const Eigen::VectorXd best_before = pop[5].genome;
      SplitMix64 rng(seed);
      mutate(pop, cfg, rng);
      CHECK(pop[5].genome == best_before);
      CHECK(pop[5].evaluated());  // cached fitness survives
    }
  }
  SUBCASE("exactly the configured share of genes moves") {
    cfg.mutation_rate = 1.0;
    cfg.mutation_sigma = 0.05;
    Population pop = fresh_population();
    const Population before = pop;
    SplitMix64 rng(11);
    mutate(pop, cfg, rng);
    for (std::size_t i = 0; i < 5; ++i) {  // index 5 is protected
      int changed = 0;
      for (long g = 0; g < 100; ++g) {
        if (pop[i].genome[g] != before[i].genome[g]) ++changed;
      }
      CHECK(changed == 10);  // 10% of 100, Gaussian moves are a.s. nonzero
      CHECK(!pop[i].evaluated());
    }
  }
  SUBCASE("bounds are enforced after mutation") {
    cfg.mutation_rate = 1.0;
    cfg.mutation_sigma = 50.0;  // huge kicks, must clamp
    Population pop = fresh_population();
    SplitMix64 rng(2);
    mutate(pop, cfg, rng);
    for (const auto& ind : pop) {
      CHECK(ind.genome.minCoeff() >= -2.0);
      CHECK(ind.genome.maxCoeff() <= 2.0);
    }
  }
}

TEST_CASE("run: sphere objective reaches the brute-force optimum region") {
  // Oracle: exhaustive grid search over [-1,1]^4 at step 0.1 confirms the
  // global maximum of -||g||^2 is 0 at the origin.
  double grid_best = -1e18;
  Eigen::VectorXd grid_arg(4);
  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b)
      for (int c = -10; c <= 10; ++c)
        for (int d = -10; d <= 10; ++d) {
          Eigen::VectorXd g(4);
          g << a / 10.0, b / 10.0, c / 10.0, d / 10.0;
          const double f = -g.squaredNorm();
          if (f > grid_best) {
            grid_best = f;
            grid_arg = g;
          }
        }
  CHECK(grid_best == 0.0);
  CHECK(grid_arg.cwiseAbs().maxCoeff() == 0.0);

  GaConfig cfg = GaConfig::with_uniform_bounds(4, -1, 1);
  cfg.population_size = 50;
  cfg.elite_k = 25;
  cfg.mutation_rate = 0.9;
  cfg.mutation_fraction = 0.5;
  cfg.mutation_sigma = 0.05;
  cfg.max_iters = 200;
  cfg.stagnation_window = 200;  // let it run
  cfg.seed = 123;
  const GaResult res =
      run_ga(cfg, [](const Eigen::VectorXd& g) { return -g.squaredNorm(); });
  CHECK(res.best.fitness >= -0.01);
  CHECK(res.best.fitness <= grid_best + 1e-12);
}

TEST_CASE("run: constant fitness stops by stagnation") {
  GaConfig cfg = GaConfig::with_uniform_bounds(3, 0, 1);
  cfg.population_size = 12;
  // The top-10 can only settle if at least 10 elites persist; with fewer,
  // fresh crossover children would displace set members every generation.
  cfg.elite_k = 10;
  cfg.mutation_rate = 0.0;  // genomes never churn
  cfg.max_iters = 500;
  cfg.stagnation_window = 5;
  cfg.seed = 9;
  const GaResult res =
      run_ga(cfg, [](const Eigen::VectorXd&) { return 1.0; });
  CHECK(res.stagnated);
  CHECK(res.generations <= cfg.stagnation_window + 1);
}

TEST_CASE("run: best-fitness history never decreases") {
  GaConfig cfg = GaConfig::with_uniform_bounds(6, -3, 3);
  cfg.population_size = 30;
  cfg.elite_k = 10;
  cfg.mutation_rate = 1.0;
  cfg.mutation_fraction = 0.5;
  cfg.mutation_sigma = 0.3;
  cfg.max_iters = 60;
  cfg.stagnation_window = 60;
  cfg.seed = 77;
  // Rugged multimodal objective.
  const FitnessFn fn = [](const Eigen::VectorXd& g) {
    return -(g.array().square() - (3.0 * g.array()).cos()).sum();
  };
  const GaResult res = run_ga(cfg, fn);
  REQUIRE(res.history.size() >= 2);
  for (std::size_t i = 1; i < res.history.size(); ++i) {
    CHECK(res.history[i].best >= res.history[i - 1].best - 1e-12);
  }
  CHECK(res.best.fitness ==
        doctest::Approx(res.history.back().best).epsilon(1e-12));
}

TEST_CASE("run: determinism across repeats and thread counts") {
  GaConfig cfg = GaConfig::with_uniform_bounds(5, -1, 1);
  cfg.population_size = 16;
  cfg.elite_k = 8;
  cfg.max_iters = 25;
  cfg.stagnation_window = 25;
  cfg.mutation_sigma = 0.1;
  cfg.seed = 2024;
  const FitnessFn fn = [](const Eigen::VectorXd& g) {
    return -(g.array() - 0.25).matrix().squaredNorm();
  };

  cfg.threads = 1;
  const GaResult a = run_ga(cfg, fn);
  const GaResult b = run_ga(cfg, fn);
  cfg.threads = 4;
  const GaResult c = run_ga(cfg, fn);

  CHECK(a.best.genome == b.best.genome);
  CHECK(a.best.genome == c.best.genome);
  REQUIRE(a.history.size() == c.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].best == c.history[i].best);
    CHECK(a.history[i].mean == c.history[i].mean);
  }

  // Bounds hold for every surviving genome.
  for (const auto& ind : a.population) {
    CHECK(ind.genome.minCoeff() >= -1.0);
    CHECK(ind.genome.maxCoeff() <= 1.0);
  }
}

TEST_CASE("run: non-finite fitness raises an evaluation error") {
  GaConfig cfg = GaConfig::with_uniform_bounds(2, 0, 1);
  cfg.population_size = 4;
  cfg.elite_k = 2;
  CHECK_THROWS_WITH_AS(
      run_ga(cfg,
             [](const Eigen::VectorXd&) {
               return std::numeric_limits<double>::quiet_NaN();
             }),
      doctest::Contains("genome"), EvalError);
}

TEST_CASE("config validation rejects bad shapes") {
  GaConfig cfg = GaConfig::with_uniform_bounds(2, 0, 1);
  cfg.population_size = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.population_size = 10;
  cfg.elite_k = 11;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.elite_k = 5;
  cfg.mutation_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.mutation_rate = 0.5;
  cfg.bounds_lo[0] = 2.0;  // lo > hi
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
