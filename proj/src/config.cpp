#include "qaml/config.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "qaml/errors.hpp"

namespace qaml {
namespace {

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError("config: " + message);
}

void require(bool ok, const std::string& message) {
  if (!ok) fail(message);
}

PcaKind pca_kind_from_name(const std::string& name) {
  if (name == "linear") return PcaKind::Linear;
  if (name == "kernel_rbf") return PcaKind::KernelRbf;
  if (name == "kernel_linear") return PcaKind::KernelLinear;
  fail("unknown pca.kind '" + name +
       "' (expected linear | kernel_rbf | kernel_linear)");
}

DraAnsatz ansatz_from_name(const std::string& name) {
  if (name == "alternating") return DraAnsatz::Alternating;
  if (name == "zy_pair") return DraAnsatz::ZyPair;
  fail("unknown ansatz '" + name + "' (expected alternating | zy_pair)");
}

CqcHead head_from_name(const std::string& name) {
  if (name == "normalize") return CqcHead::Normalize;
  if (name == "softmax_fc") return CqcHead::SoftmaxFc;
  fail("unknown cqc.head '" + name + "' (expected normalize | softmax_fc)");
}

GaSettings ga_settings_from_json(const json& j, const GaSettings& defaults) {
  GaSettings s = defaults;
  s.population = j.value("population", s.population);
  s.elite = j.value("elite", s.elite);
  s.mutation_rate = j.value("mutation_rate", s.mutation_rate);
  s.mutation_fraction = j.value("mutation_fraction", s.mutation_fraction);
  s.mutation_sigma = j.value("mutation_sigma", s.mutation_sigma);
  s.max_iters = j.value("max_iters", s.max_iters);
  s.stagnation_window = j.value("stagnation_window", s.stagnation_window);
  return s;
}

void validate_ga(const GaSettings& s, const std::string& where) {
  require(s.population >= 2, where + ".population must be >= 2");
  require(s.elite >= 1 && s.elite <= s.population,
          where + ".elite must be in [1, population]");
  require(s.mutation_rate >= 0.0 && s.mutation_rate <= 1.0,
          where + ".mutation_rate must be in [0, 1]");
  require(s.mutation_fraction > 0.0 && s.mutation_fraction <= 1.0,
          where + ".mutation_fraction must be in (0, 1]");
  require(s.mutation_sigma > 0.0, where + ".mutation_sigma must be positive");
  require(s.max_iters >= 1, where + ".max_iters must be >= 1");
  require(s.stagnation_window >= 1,
          where + ".stagnation_window must be >= 1");
}

}  // namespace

GaConfig GaSettings::to_ga_config(long genes, double lo, double hi,
                                  uint64_t seed, int threads) const {
  GaConfig ga = GaConfig::with_uniform_bounds(genes, lo, hi);
  ga.population_size = population;
  ga.elite_k = elite;
  ga.mutation_rate = mutation_rate;
  ga.mutation_fraction = mutation_fraction;
  ga.mutation_sigma = mutation_sigma;
  ga.max_iters = max_iters;
  ga.stagnation_window = stagnation_window;
  ga.seed = seed;
  ga.threads = threads;
  return ga;
}

ExperimentConfig::ExperimentConfig() {
  // Training explores angle/weight space around the zero seed; the coarse
  // unit-normal default suits 0-255 pixel genomes (attack), not these.
  train_ga.mutation_sigma = 0.3;
}

void ExperimentConfig::validate() const {
  require(!data.images.empty(), "data.images is required");
  require(!data.labels.empty(), "data.labels is required");
  require(std::filesystem::exists(data.images),
          "data.images not found: " + data.images);
  require(std::filesystem::exists(data.labels),
          "data.labels not found: " + data.labels);

  require(!digits.empty(), "digits must be non-empty");
  require(digits.size() >= 2, "need at least two digits to classify");
  std::set<int> seen;
  for (int d : digits) {
    require(d >= 0 && d <= 9, "digits entries must be in [0, 9]");
    require(seen.insert(d).second, "digits entries must be unique");
  }

  require(train_size >= 1, "train_size must be >= 1");
  require(test_size >= 1, "test_size must be >= 1");
  require(threads >= 1, "threads must be >= 1");
  require(shots >= 0, "shots must be >= 0 (0 = exact probabilities)");
  require(!out_dir.empty(), "out_dir must be non-empty");

  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("noise: ") + e.what());
  }

  if (kind == ClassifierKind::PcaDra) {
    require(pca.components >= 1, "classifier.pca.components must be >= 1");
    require(pca.gamma >= 0.0, "classifier.pca.gamma must be >= 0");
    require(pca.gamma == 0.0 || pca.kind == PcaKind::KernelRbf,
            "classifier.pca.gamma only applies to kernel_rbf");
    require(dra.layers >= 1, "classifier.dra.layers must be >= 1");
    require(dra.tie_groups >= 1 && dra.tie_groups <= dra.layers,
            "classifier.dra.tie_groups must be in [1, layers]");
    require(dra.theta_bound > 0.0,
            "classifier.dra.theta_bound must be positive");
    require(num_classes() <= 4,
            "pca_dra supports at most 4 classes (label-state constellation)");
  } else {
    require(cqc.depth >= 1, "classifier.cqc.depth must be >= 1");
    require(cqc.weight_bound > 0.0,
            "classifier.cqc.weight_bound must be positive");
    require(num_classes() <= 9,
            "cqc reads classes off a 3x3 grid; at most 9 classes");
  }

  validate_ga(train_ga, "train");
  validate_ga(attack.ga, "attack.ga");
  require(attack.num_seeds >= 1, "attack.num_seeds must be >= 1");
  require(attack.w0 >= 0.0, "attack.w0 must be >= 0");
  require(attack.w1 >= 0.0, "attack.w1 must be >= 0");
  require(attack.target >= -1 && attack.target < num_classes(),
          "attack.target must be -1 (auto) or a valid class index");

  require(certify.level > 0.0 && certify.level < 1.0,
          "certify.level must be in (0, 1)");
  require(!certify.epsilon_grid.empty(),
          "certify.epsilon_grid must be non-empty");
  for (double eps : certify.epsilon_grid) {
    require(eps >= 0.0 && eps <= 1.0,
            "certify.epsilon_grid entries must be in [0, 1]");
  }
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    require(j.is_object(), "top level must be a JSON object");
    require(j.contains("data") && j["data"].is_object(),
            "data section with images/labels paths is required");
    cfg.data.images = j["data"].value("images", std::string{});
    cfg.data.labels = j["data"].value("labels", std::string{});

    cfg.digits = j.value("digits", cfg.digits);
    cfg.train_size = j.value("train_size", cfg.train_size);
    cfg.test_size = j.value("test_size", cfg.test_size);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.shots = j.value("shots", cfg.shots);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);

    if (j.contains("noise")) {
      const json& n = j["noise"];
      if (n.is_string()) {
        const std::string preset = n.get<std::string>();
        if (preset == "none") {
          cfg.noise = NoiseModel{};
        } else if (preset == "device_like") {
          cfg.noise = device_like_noise();
        } else {
          fail("unknown noise preset '" + preset +
               "' (expected none | device_like | an object)");
        }
        cfg.noise_preset = preset;
      } else if (n.is_object()) {
        try {
          cfg.noise = noise_from_json(n);
        } catch (const FormatError& e) {
          fail(std::string("noise: ") + e.what());
        }
        cfg.noise_preset = "custom";
      } else {
        fail("noise must be a preset name or an object");
      }
    }

    if (j.contains("classifier")) {
      const json& c = j["classifier"];
      require(c.is_object(), "classifier must be an object");
      const std::string kind = c.value("kind", std::string{"pca_dra"});
      if (kind == "pca_dra") {
        cfg.kind = ClassifierKind::PcaDra;
      } else if (kind == "cqc") {
        cfg.kind = ClassifierKind::Cqc;
      } else {
        fail("unknown classifier.kind '" + kind +
             "' (expected pca_dra | cqc)");
      }
      if (c.contains("pca")) {
        const json& p = c["pca"];
        cfg.pca.kind = pca_kind_from_name(
            p.value("kind", std::string{"linear"}));
        cfg.pca.components = p.value("components", cfg.pca.components);
        cfg.pca.gamma = p.value("gamma", cfg.pca.gamma);
      }
      if (c.contains("dra")) {
        const json& d = c["dra"];
        cfg.dra.layers = d.value("layers", cfg.dra.layers);
        cfg.dra.tie_groups = d.value("tie_groups", cfg.dra.tie_groups);
        cfg.dra.ansatz =
            ansatz_from_name(d.value("ansatz", std::string{"alternating"}));
        cfg.dra.theta_bound = d.value("theta_bound", cfg.dra.theta_bound);
      }
      if (c.contains("cqc")) {
        const json& q = c["cqc"];
        cfg.cqc.depth = q.value("depth", cfg.cqc.depth);
        cfg.cqc.head =
            head_from_name(q.value("head", std::string{"normalize"}));
        cfg.cqc.ansatz =
            ansatz_from_name(q.value("ansatz", std::string{"alternating"}));
        cfg.cqc.weight_bound = q.value("weight_bound", cfg.cqc.weight_bound);
      }
    }

    if (j.contains("train")) {
      cfg.train_ga = ga_settings_from_json(j["train"], cfg.train_ga);
    }
    if (j.contains("attack")) {
      const json& a = j["attack"];
      require(a.is_object(), "attack must be an object");
      cfg.attack.num_seeds = a.value("num_seeds", cfg.attack.num_seeds);
      cfg.attack.w0 = a.value("w0", cfg.attack.w0);
      cfg.attack.w1 = a.value("w1", cfg.attack.w1);
      cfg.attack.target = a.value("target", cfg.attack.target);
      if (a.contains("ga")) {
        cfg.attack.ga = ga_settings_from_json(a["ga"], cfg.attack.ga);
      }
    }
    if (j.contains("certify")) {
      const json& ce = j["certify"];
      require(ce.is_object(), "certify must be an object");
      cfg.certify.level = ce.value("level", cfg.certify.level);
      cfg.certify.epsilon_grid =
          ce.value("epsilon_grid", cfg.certify.epsilon_grid);
    }
  } catch (const json::exception& e) {
    fail(std::string("malformed field: ") + e.what());
  }

  cfg.snapshot = j;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  json j;
  try {
    j = load_json_file(path);
  } catch (const FormatError& e) {
    // A config file that cannot be read or parsed is a configuration
    // problem, not a data-format problem.
    fail(e.what());
  }
  return experiment_config_from_json(j);
}

void apply_overrides(ExperimentConfig& cfg, std::optional<uint64_t> seed,
                     std::optional<std::string> out_dir,
                     std::optional<long> shots) {
  if (seed) {
    cfg.seed = *seed;
    cfg.snapshot["seed"] = *seed;
  }
  if (out_dir) {
    if (out_dir->empty()) fail("--out must be non-empty");
    cfg.out_dir = *out_dir;
    cfg.snapshot["out_dir"] = *out_dir;
  }
  if (shots) {
    if (*shots < 0) fail("--shots must be >= 0");
    cfg.shots = *shots;
    cfg.snapshot["shots"] = *shots;
  }
}

}  // namespace qaml
