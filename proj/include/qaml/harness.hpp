#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qaml/attack.hpp"
#include "qaml/config.hpp"
#include "qaml/report.hpp"

namespace qaml {

// Experiment driver behind the CLI. Every command re-derives its data split
// from the source files and the config seed, so the commands compose without
// hidden state: `train` then `eval` see the same split whether or not
// `prepare` ever ran.

struct SplitData {
  LabeledDataset train;
  LabeledDataset test;
};

// Load, filter to the configured digits, shuffle deterministically, split.
// Throws ConfigError when the source data cannot fill the requested sizes,
// FormatError when the IDX files are malformed.
SplitData prepare_split(const ExperimentConfig& cfg);

// A trained model plus everything needed to run it on raw images.
struct TrainedClassifier {
  ClassifierKind kind = ClassifierKind::PcaDra;
  int num_classes = 2;
  std::vector<int> digits;  // class index -> original digit
  PcaModel pca;             // pca_dra only
  DraModel dra;             // pca_dra only
  CqcModel cqc;             // cqc only

  Eigen::VectorXd forward(const ImageTensor& image) const;
  int predict(const ImageTensor& image) const;
  Evaluation evaluate(const std::vector<ImageTensor>& images,
                      const std::vector<int>& labels,
                      std::optional<long> shots, uint64_t seed,
                      int threads = 1) const;
  long gates_per_forward() const;
  const NoiseModel& noise() const;
  void set_noise(const NoiseModel& noise);

  // Adapter for the adversarial generator.
  ClassifierFn as_classifier_fn() const;
};

// Model directory layout: classifier.json manifest naming the kind plus
// pca.qpca + dra.json, or cqc.json.
void save_classifier(const TrainedClassifier& c, const std::string& dir);
TrainedClassifier load_classifier(const std::string& dir);  // FormatError

struct TrainOutcome {
  TrainedClassifier classifier;
  double train_accuracy = 0.0;
  double best_fitness = 0.0;
  int generations = 0;
  bool stagnated = false;
  long fitness_evaluations = 0;
  std::vector<GenerationStats> history;
};

// Fits the feature map (pca_dra) and evolves the trainable parameters with
// the GA. Fitness = mean log-likelihood with a small accuracy tie-break.
TrainOutcome train_classifier(const ExperimentConfig& cfg,
                              const LabeledDataset& train);

// Commands. Each writes its artifacts under cfg.out_dir/<command>/ and
// returns 0; failures surface as exceptions that the CLI maps to exit
// codes. `model_dir` defaults to cfg.out_dir + "/model" when empty.
int cmd_prepare(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_eval(const ExperimentConfig& cfg, const std::string& model_dir);
int cmd_attack(const ExperimentConfig& cfg, const std::string& model_dir);
int cmd_certify(const ExperimentConfig& cfg, const std::string& model_dir);
int cmd_noise_sweep(const ExperimentConfig& cfg, const std::string& model_dir,
                    ChannelKind channel, const std::vector<double>& grid);

}  // namespace qaml
