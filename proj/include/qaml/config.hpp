#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qaml/cqc.hpp"
#include "qaml/dra.hpp"
#include "qaml/evolve.hpp"
#include "qaml/noise.hpp"
#include "qaml/pca.hpp"
#include "qaml/serde.hpp"

namespace qaml {

inline constexpr const char* kToolVersion = "qaml 0.1.0";

enum class ClassifierKind { PcaDra, Cqc };

struct DataPaths {
  std::string images;
  std::string labels;
};

struct PcaSettings {
  PcaKind kind = PcaKind::Linear;
  int components = 2;
  double gamma = 0.0;  // 0 = median-distance heuristic (RBF only)
};

struct DraSettings {
  int layers = 7;
  int tie_groups = 7;
  DraAnsatz ansatz = DraAnsatz::Alternating;
  double theta_bound = 6.2831853071795865;  // GA search box half-width
};

struct CqcArchSettings {
  int depth = 5;
  CqcHead head = CqcHead::Normalize;
  DraAnsatz ansatz = DraAnsatz::Alternating;
  double weight_bound = 2.0;  // GA search box half-width
};

// GA knobs as configured; converted to a GaConfig once the genome length
// and bounds are known.
struct GaSettings {
  int population = 200;
  int elite = 100;
  double mutation_rate = 0.8;
  double mutation_fraction = 0.1;
  double mutation_sigma = 1.0;
  int max_iters = 500;
  int stagnation_window = 20;

  GaConfig to_ga_config(long genes, double lo, double hi, uint64_t seed,
                        int threads) const;
};

struct AttackSettings {
  int num_seeds = 50;
  double w0 = 1.0;
  double w1 = 1.2;
  int target = -1;  // -1: strongest wrong class per seed image
  GaSettings ga;    // defaults overridden in ExperimentConfig()
};

struct CertifySettings {
  double level = 0.9;
  std::vector<double> epsilon_grid = {0.0,  0.05, 0.1,  0.15, 0.2,
                                      0.25, 0.3,  0.35, 0.4,  0.45, 0.5};
};

struct ExperimentConfig {
  DataPaths data;
  std::vector<int> digits = {0, 1};
  int train_size = 1000;
  int test_size = 200;
  uint64_t seed = 7;
  int threads = 1;
  long shots = 0;  // 0 = exact probabilities
  std::string out_dir = "out";

  std::string noise_preset = "none";  // none | device_like | custom
  NoiseModel noise;                   // resolved from the preset

  ClassifierKind kind = ClassifierKind::PcaDra;
  PcaSettings pca;
  DraSettings dra;
  CqcArchSettings cqc;

  GaSettings train_ga;
  AttackSettings attack;
  CertifySettings certify;

  json snapshot;  // raw config document, echoed into reports

  ExperimentConfig();  // sets training-specific GA defaults
  int num_classes() const { return static_cast<int>(digits.size()); }
  void validate() const;  // throws ConfigError
};

// Parses and validates a config file. All failures — unreadable file,
// malformed JSON, bad field values, missing data files — surface as
// ConfigError: the configuration is the broken input here.
ExperimentConfig load_experiment_config(const std::string& path);

// Parses from an in-memory document (same validation).
ExperimentConfig experiment_config_from_json(const json& j);

// CLI-level overrides; also patches the snapshot so reports echo the
// effective values. Throws ConfigError on bad values.
void apply_overrides(ExperimentConfig& cfg, std::optional<uint64_t> seed,
                     std::optional<std::string> out_dir,
                     std::optional<long> shots);

}  // namespace qaml
