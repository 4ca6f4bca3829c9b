#include "qaml/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "qaml/cqc.hpp"
#include "qaml/dra.hpp"
#include "qaml/errors.hpp"
#include "qaml/idx.hpp"
#include "qaml/pca.hpp"
#include "qaml/robustness.hpp"
#include "qaml/rng.hpp"

namespace qaml {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json base_report(const ExperimentConfig& cfg, const std::string& command) {
  json j;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["noise_preset"] = cfg.noise_preset;
  j["config"] = cfg.snapshot;
  return j;
}

std::string resolve_model_dir(const ExperimentConfig& cfg,
                              const std::string& model_dir) {
  return model_dir.empty() ? cfg.out_dir + "/model" : model_dir;
}

std::vector<int> sorted_digits(const ExperimentConfig& cfg) {
  std::vector<int> d = cfg.digits;
  std::sort(d.begin(), d.end());
  return d;
}

// digit -> sample count for one split, keyed by decimal digit string.
json digit_counts(const LabeledDataset& d) {
  std::map<int, long> counts;
  for (int label : d.labels) ++counts[d.digit_of(label)];
  json j = json::object();
  for (const auto& [digit, n] : counts) j[std::to_string(digit)] = n;
  return j;
}

constexpr double kLogFloor = 1e-12;
constexpr double kAccuracyTieBreak = 1e-6;

// Mean log-likelihood of the truth class plus a small accuracy tie-break,
// so equal-likelihood genomes are ranked by the decision they actually make.
template <typename ForwardFn>
double training_fitness(const ForwardFn& forward, long n,
                        const std::vector<int>& labels) {
  double log_sum = 0.0;
  long correct = 0;
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd probs = forward(i);
    log_sum += std::log(std::max(probs(labels[std::size_t(i)]), kLogFloor));
    if (argmax_class(probs) == labels[std::size_t(i)]) ++correct;
  }
  return log_sum / double(n) + kAccuracyTieBreak * double(correct) / double(n);
}

Eigen::MatrixXd theta_from_genome(const Eigen::VectorXd& genome, int rows,
                                  int cols) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(genome.data(), rows,
                                                          cols);
}

std::string tsv_cell(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

}  // namespace

SplitData prepare_split(const ExperimentConfig& cfg) {
  const LabeledDataset all = load_idx_dataset(cfg.data.images, cfg.data.labels);
  const std::set<int> digit_set(cfg.digits.begin(), cfg.digits.end());
  const std::size_t want =
      std::size_t(cfg.train_size) + std::size_t(cfg.test_size);
  const uint64_t split_seed = seed_for(cfg.seed, "split");

  // Per-class cap keeps the pool balanced; when a class runs short, fall
  // back to everything available.
  const int cap =
      int((want + digit_set.size() - 1) / digit_set.size());
  LabeledDataset pool;
  try {
    pool = subset(all, digit_set, cap, split_seed);
    if (pool.size() < want) {
      pool = subset(all, digit_set, std::nullopt, split_seed);
    }
  } catch (const EvalError&) {
    throw ConfigError(
        "config: none of the requested digits appear in the source data");
  }
  if (pool.size() < want) {
    throw ConfigError(
        "config: source data has only " + std::to_string(pool.size()) +
        " samples of the requested digits; need " + std::to_string(want));
  }
  // The pool's class map always covers the requested digit set, so check
  // the labels actually drawn rather than the map.
  const std::set<int> present(pool.labels.begin(), pool.labels.end());
  if (int(present.size()) != cfg.num_classes()) {
    throw ConfigError(
        "config: some requested digits are absent from the source data");
  }

  auto [train, rest] = split_at(pool, std::size_t(cfg.train_size));
  auto [test, surplus] = split_at(rest, std::size_t(cfg.test_size));
  (void)surplus;
  return SplitData{std::move(train), std::move(test)};
}

Eigen::VectorXd TrainedClassifier::forward(const ImageTensor& image) const {
  if (kind == ClassifierKind::PcaDra) {
    return dra_forward(dra, pca_transform(pca, image));
  }
  return cqc_forward(cqc, image.values);
}

int TrainedClassifier::predict(const ImageTensor& image) const {
  return argmax_class(forward(image));
}

Evaluation TrainedClassifier::evaluate(const std::vector<ImageTensor>& images,
                                       const std::vector<int>& labels,
                                       std::optional<long> shots,
                                       uint64_t seed, int threads) const {
  if (kind == ClassifierKind::PcaDra) {
    LabeledDataset view;
    view.images = images;
    view.labels = labels;
    const Eigen::MatrixXd features = pca_transform_all(pca, view);
    return dra_evaluate(dra, features, labels, shots, seed, threads);
  }
  return cqc_evaluate(cqc, images, labels, shots, seed, threads);
}

long TrainedClassifier::gates_per_forward() const {
  return kind == ClassifierKind::PcaDra ? dra.gates_per_forward()
                                        : cqc.gates_per_forward();
}

const NoiseModel& TrainedClassifier::noise() const {
  return kind == ClassifierKind::PcaDra ? dra.noise : cqc.noise;
}

void TrainedClassifier::set_noise(const NoiseModel& n) {
  if (kind == ClassifierKind::PcaDra) {
    dra.noise = n;
  } else {
    cqc.noise = n;
  }
}

ClassifierFn TrainedClassifier::as_classifier_fn() const {
  return [this](const ImageTensor& image) { return forward(image); };
}

void save_classifier(const TrainedClassifier& c, const std::string& dir) {
  ensure_dir(dir);
  json manifest;
  manifest["format"] = "qaml-classifier";
  manifest["version"] = 1;
  manifest["num_classes"] = c.num_classes;
  manifest["digits"] = c.digits;
  if (c.kind == ClassifierKind::PcaDra) {
    manifest["kind"] = "pca_dra";
    manifest["pca"] = "pca.qpca";
    manifest["dra"] = "dra.json";
    save_pca(c.pca, dir + "/pca.qpca");
    save_dra(c.dra, dir + "/dra.json");
  } else {
    manifest["kind"] = "cqc";
    manifest["cqc"] = "cqc.json";
    save_cqc(c.cqc, dir + "/cqc.json");
  }
  save_json_file(manifest, dir + "/classifier.json");
}

TrainedClassifier load_classifier(const std::string& dir) {
  const json manifest = load_json_file(dir + "/classifier.json");
  TrainedClassifier c;
  try {
    if (manifest.at("format").get<std::string>() != "qaml-classifier") {
      throw FormatError("classifier manifest: unexpected format tag");
    }
    c.num_classes = manifest.at("num_classes").get<int>();
    c.digits = manifest.value("digits", std::vector<int>{});
    const std::string kind = manifest.at("kind").get<std::string>();
    if (kind == "pca_dra") {
      c.kind = ClassifierKind::PcaDra;
      c.pca = load_pca(dir + "/" + manifest.at("pca").get<std::string>());
      c.dra = load_dra(dir + "/" + manifest.at("dra").get<std::string>());
    } else if (kind == "cqc") {
      c.kind = ClassifierKind::Cqc;
      c.cqc = load_cqc(dir + "/" + manifest.at("cqc").get<std::string>());
    } else {
      throw FormatError("classifier manifest: unknown kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("classifier manifest: ") + e.what());
  }
  return c;
}

TrainOutcome train_classifier(const ExperimentConfig& cfg,
                              const LabeledDataset& train) {
  if (train.size() == 0) {
    throw EvalError("train_classifier: empty training set");
  }
  if (train.num_classes() != cfg.num_classes()) {
    throw ConfigError(
        "config: training split does not cover all configured digits");
  }

  TrainOutcome out;
  out.classifier.kind = cfg.kind;
  out.classifier.num_classes = cfg.num_classes();
  out.classifier.digits = sorted_digits(cfg);
  const uint64_t ga_seed = seed_for(cfg.seed, "train-ga");
  const long n = long(train.size());

  if (cfg.kind == ClassifierKind::PcaDra) {
    const std::optional<double> gamma =
        cfg.pca.gamma > 0.0 ? std::optional<double>(cfg.pca.gamma)
                            : std::nullopt;
    out.classifier.pca = fit_pca(train, cfg.pca.kind, cfg.pca.components,
                                 gamma);
    const Eigen::MatrixXd features =
        pca_transform_all(out.classifier.pca, train);

    DraModel base;
    base.layers = cfg.dra.layers;
    base.ansatz = cfg.dra.ansatz;
    base.theta =
        Eigen::MatrixXd::Zero(cfg.dra.tie_groups, cfg.pca.components + 1);
    base.label_states = label_states_for(cfg.num_classes());
    base.noise = cfg.noise;

    const int rows = int(base.theta.rows());
    const int cols = int(base.theta.cols());
    const FitnessFn fitness = [&](const Eigen::VectorXd& genome) {
      DraModel m = base;
      m.theta = theta_from_genome(genome, rows, cols);
      return training_fitness(
          [&](long i) { return dra_forward(m, features.row(i).transpose()); },
          n, train.labels);
    };

    const GaConfig ga = cfg.train_ga.to_ga_config(
        base.theta.size(), -cfg.dra.theta_bound, cfg.dra.theta_bound, ga_seed,
        cfg.threads);
    // Seed the search at zero parameters: uniform draws over the full angle
    // box land in a wrapped-phase regime with no usable signal, while the
    // smooth basin sits around small angles.
    const GaResult res = run_ga(
        ga, fitness, GaInit::seeded_from(Eigen::VectorXd::Zero(ga.genome_length())));

    base.theta = theta_from_genome(res.best.genome, rows, cols);
    out.classifier.dra = base;
    out.best_fitness = res.best.fitness;
    out.generations = res.generations;
    out.stagnated = res.stagnated;
    out.fitness_evaluations = res.fitness_evaluations;
    out.history = res.history;
    out.train_accuracy =
        dra_evaluate(out.classifier.dra, features, train.labels, std::nullopt,
                     0, cfg.threads)
            .accuracy;
    return out;
  }

  CqcModel base = fig4_architecture(cfg.num_classes(), cfg.cqc.depth);
  base.ansatz = cfg.cqc.ansatz;
  base.head = cfg.cqc.head;
  if (cfg.cqc.head == CqcHead::SoftmaxFc) {
    base.fc_weight =
        Eigen::MatrixXd::Zero(cfg.num_classes(), cfg.num_classes());
    base.fc_bias = Eigen::VectorXd::Zero(cfg.num_classes());
  }
  base.noise = cfg.noise;

  const FitnessFn fitness = [&](const Eigen::VectorXd& genome) {
    CqcModel m = base;
    unpack_weights(m, genome);
    return training_fitness(
        [&](long i) { return cqc_forward(m, train.images[std::size_t(i)].values); },
        n, train.labels);
  };

  const GaConfig ga = cfg.train_ga.to_ga_config(
      base.param_count(), -cfg.cqc.weight_bound, cfg.cqc.weight_bound, ga_seed,
      cfg.threads);
  const GaResult res = run_ga(
      ga, fitness, GaInit::seeded_from(pack_weights(base)));

  unpack_weights(base, res.best.genome);
  out.classifier.cqc = base;
  out.best_fitness = res.best.fitness;
  out.generations = res.generations;
  out.stagnated = res.stagnated;
  out.fitness_evaluations = res.fitness_evaluations;
  out.history = res.history;
  out.train_accuracy = cqc_evaluate(out.classifier.cqc, train.images,
                                    train.labels, std::nullopt, 0, cfg.threads)
                           .accuracy;
  return out;
}

int cmd_prepare(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const SplitData s = prepare_split(cfg);

  const std::string dir = cfg.out_dir + "/prepared";
  ensure_dir(dir);
  save_idx_dataset(s.train, dir + "/train-images.idx3-ubyte.gz",
                   dir + "/train-labels.idx1-ubyte.gz", true);
  save_idx_dataset(s.test, dir + "/test-images.idx3-ubyte.gz",
                   dir + "/test-labels.idx1-ubyte.gz", true);

  json report = base_report(cfg, "prepare");
  report["train_size"] = s.train.size();
  report["test_size"] = s.test.size();
  report["train_class_counts"] = digit_counts(s.train);
  report["test_class_counts"] = digit_counts(s.test);
  save_json_file(report, dir + "/report.json");
  write_timing_sidecar(dir, "prepare", seconds_since(t0));

  std::cout << "prepare: wrote " << s.train.size() << " train / "
            << s.test.size() << " test samples to " << dir << "\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const SplitData s = prepare_split(cfg);
  const TrainOutcome out = train_classifier(cfg, s.train);

  save_classifier(out.classifier, cfg.out_dir + "/model");
  const std::string dir = cfg.out_dir + "/train";
  ensure_dir(dir);

  std::ostringstream curve;
  curve << "generation\tbest\tmean\tstddev\n";
  for (const GenerationStats& g : out.history) {
    curve << g.generation << "\t" << tsv_cell(g.best) << "\t"
          << tsv_cell(g.mean) << "\t" << tsv_cell(g.stddev) << "\n";
  }
  write_text_file(dir + "/training_curve.tsv", curve.str());

  const bool improved = out.history.size() >= 2 &&
                        out.history.back().best > out.history.front().best;

  json report = base_report(cfg, "train");
  report["train_size"] = s.train.size();
  report["train_accuracy"] = out.train_accuracy;
  report["best_fitness"] = out.best_fitness;
  report["generations"] = out.generations;
  report["stagnated"] = out.stagnated;
  report["fitness_evaluations"] = out.fitness_evaluations;
  report["param_count"] = out.classifier.kind == ClassifierKind::PcaDra
                              ? out.classifier.dra.param_count()
                              : out.classifier.cqc.param_count();
  report["improved"] = improved;
  if (!improved) {
    report["warning"] =
        "best fitness did not improve over the initial population; "
        "consider more iterations or different GA settings";
  }
  save_json_file(report, dir + "/report.json");
  write_timing_sidecar(dir, "train", seconds_since(t0));

  std::cout << "train: accuracy=" << out.train_accuracy
            << " generations=" << out.generations
            << " stagnated=" << (out.stagnated ? "yes" : "no") << "\n";
  if (!improved) {
    std::cout << "train: warning: " << report["warning"].get<std::string>()
              << "\n";
  }
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& model_dir) {
  const auto t0 = Clock::now();
  const std::string md = resolve_model_dir(cfg, model_dir);
  const TrainedClassifier c = load_classifier(md);
  const SplitData s = prepare_split(cfg);

  const Evaluation exact =
      c.evaluate(s.test.images, s.test.labels, std::nullopt, 0, cfg.threads);

  const std::string dir = cfg.out_dir + "/eval";
  ensure_dir(dir);
  write_records_jsonl(exact.records, dir + "/records.jsonl");

  json report = base_report(cfg, "eval");
  report["model_dir"] = md;
  report["test_size"] = s.test.size();
  report["accuracy"] = exact.accuracy;
  if (cfg.shots > 0) {
    const Evaluation sampled =
        c.evaluate(s.test.images, s.test.labels, cfg.shots,
                   seed_for(cfg.seed, "eval"), cfg.threads);
    report["shots"] = cfg.shots;
    report["accuracy_shots"] = sampled.accuracy;
    write_records_jsonl(sampled.records, dir + "/records_shots.jsonl");
  }
  save_json_file(report, dir + "/report.json");
  write_timing_sidecar(dir, "eval", seconds_since(t0));

  std::cout << "eval: accuracy=" << exact.accuracy;
  if (cfg.shots > 0) {
    std::cout << " accuracy@" << cfg.shots
              << "shots=" << report["accuracy_shots"].get<double>();
  }
  std::cout << " on " << s.test.size() << " test samples\n";
  return 0;
}

int cmd_attack(const ExperimentConfig& cfg, const std::string& model_dir) {
  const auto t0 = Clock::now();
  const std::string md = resolve_model_dir(cfg, model_dir);
  const TrainedClassifier c = load_classifier(md);
  const SplitData s = prepare_split(cfg);

  const Evaluation exact =
      c.evaluate(s.test.images, s.test.labels, std::nullopt, 0, cfg.threads);

  // Attack the first num_seeds correctly classified test images.
  std::vector<std::size_t> picks;
  for (std::size_t i = 0;
       i < exact.records.size() && int(picks.size()) < cfg.attack.num_seeds;
       ++i) {
    if (exact.records[i].correct()) picks.push_back(i);
  }
  if (picks.empty()) {
    throw EvalError("attack: no correctly classified test images to attack");
  }

  const long pixels = s.test.images.front().pixels();
  AttackConfig acfg;
  acfg.target_class = cfg.attack.target;
  acfg.w0 = cfg.attack.w0;
  acfg.w1 = cfg.attack.w1;
  acfg.ga = cfg.attack.ga.to_ga_config(pixels, 0.0, 255.0, 0, cfg.threads);

  const uint64_t attack_seed = seed_for(cfg.seed, "attack");
  const ClassifierFn fn = c.as_classifier_fn();
  std::vector<AdversarialResult> results;
  results.reserve(picks.size());
  for (std::size_t i = 0; i < picks.size(); ++i) {
    acfg.ga.seed = seed_for(attack_seed, uint64_t(i));
    results.push_back(generate_adversarial(s.test.images[picks[i]],
                                           s.test.labels[picks[i]], fn, acfg));
  }

  long still_correct = 0, succeeded = 0;
  std::vector<double> rmses, perturbations;
  LabeledDataset adv;
  adv.class_map = s.test.class_map;
  std::ostringstream tsv;
  tsv << "seed_index\tseed_digit\ttarget_class\tpredicted_class\tsuccess\t"
         "p_adv\trmse\tavg_pixel_perturbation\tgenerations\tclassifier_"
         "calls\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const AdversarialResult& r = results[i];
    if (r.predicted_class == r.seed_label) ++still_correct;
    if (r.success) ++succeeded;
    rmses.push_back(r.rmse);
    perturbations.push_back(r.avg_pixel_perturbation);
    adv.images.push_back(r.adversarial);
    adv.labels.push_back(r.seed_label);
    tsv << picks[i] << "\t" << s.test.digit_of(r.seed_label) << "\t"
        << r.target_class << "\t" << r.predicted_class << "\t"
        << (r.success ? 1 : 0) << "\t" << tsv_cell(r.p_adv) << "\t"
        << tsv_cell(r.rmse) << "\t" << tsv_cell(r.avg_pixel_perturbation)
        << "\t" << r.generations_used << "\t" << r.classifier_calls << "\n";
  }
  // "Adversarial accuracy": how often the classifier still gets the true
  // label right on the perturbed images.
  const double adversarial_accuracy =
      double(still_correct) / double(results.size());
  const double success_rate = double(succeeded) / double(results.size());

  const std::string dir = cfg.out_dir + "/attack";
  ensure_dir(dir);
  write_text_file(dir + "/attack.tsv", tsv.str());
  save_idx_dataset(adv, dir + "/adv-images.idx3-ubyte.gz",
                   dir + "/adv-labels.idx1-ubyte.gz", true);

  json report = base_report(cfg, "attack");
  report["model_dir"] = md;
  report["num_seeds"] = results.size();
  report["adversarial_accuracy"] = adversarial_accuracy;
  report["success_rate"] = success_rate;
  report["mean_rmse"] = mean_of(rmses);
  report["mean_avg_pixel_perturbation"] = mean_of(perturbations);
  report["test_accuracy"] = exact.accuracy;
  save_json_file(report, dir + "/report.json");
  write_timing_sidecar(dir, "attack", seconds_since(t0));

  std::cout << "attack: adversarial_accuracy=" << adversarial_accuracy
            << " success_rate=" << success_rate
            << " mean_rmse=" << mean_of(rmses) << " over " << results.size()
            << " seeds\n";
  return 0;
}

int cmd_certify(const ExperimentConfig& cfg, const std::string& model_dir) {
  const auto t0 = Clock::now();
  if (cfg.shots <= 0) {
    throw ConfigError(
        "config: certify needs shots > 0 (confidence bounds are "
        "finite-sample)");
  }
  const std::string md = resolve_model_dir(cfg, model_dir);
  const TrainedClassifier c = load_classifier(md);
  const SplitData s = prepare_split(cfg);

  const Evaluation exact =
      c.evaluate(s.test.images, s.test.labels, std::nullopt, 0, cfg.threads);
  Evaluation sampled = c.evaluate(s.test.images, s.test.labels, cfg.shots,
                                  seed_for(cfg.seed, "eval"), cfg.threads);

  const double p_eff =
      effective_depolarization(c.noise(), int(c.gates_per_forward()));
  certify_records(sampled.records, p_eff, cfg.certify.level, cfg.threads);
  const CertificationSummary summary = summarize_certification(sampled.records);

  std::vector<double> grid = cfg.certify.epsilon_grid;
  std::sort(grid.begin(), grid.end());
  json curve = json::array();
  for (double eps : grid) {
    curve.push_back({{"epsilon", eps},
                     {"certified_accuracy",
                      certified_accuracy(sampled.records, eps)}});
  }

  const std::string dir = cfg.out_dir + "/certify";
  ensure_dir(dir);
  write_records_jsonl(sampled.records, dir + "/records.jsonl");
  write_text_file(dir + "/certification.tsv",
                  certification_tsv(sampled.records));

  json report = base_report(cfg, "certify");
  report["model_dir"] = md;
  report["test_size"] = s.test.size();
  report["shots"] = cfg.shots;
  report["level"] = cfg.certify.level;
  report["effective_depolarization"] = p_eff;
  report["accuracy"] = exact.accuracy;
  report["accuracy_shots"] = sampled.accuracy;
  report["certified"] = summary.certified;
  report["uncertified"] = summary.uncertified;
  report["certified_errors"] = summary.certified_errors;
  report["uncertified_errors"] = summary.uncertified_errors;
  report["certified_error_rate"] = summary.certified_error_rate;
  report["uncertified_error_rate"] = summary.uncertified_error_rate;
  report["certified_accuracy_curve"] = curve;
  save_json_file(report, dir + "/report.json");
  write_timing_sidecar(dir, "certify", seconds_since(t0));

  std::cout << "certify: certified=" << summary.certified << "/"
            << sampled.records.size()
            << " certified_error_rate=" << summary.certified_error_rate
            << " uncertified_error_rate=" << summary.uncertified_error_rate
            << " p_eff=" << p_eff << "\n";
  return 0;
}

int cmd_noise_sweep(const ExperimentConfig& cfg, const std::string& model_dir,
                    ChannelKind channel, const std::vector<double>& grid) {
  const auto t0 = Clock::now();
  if (grid.empty()) {
    throw ConfigError("config: noise sweep needs a non-empty probability grid");
  }
  const std::string md = resolve_model_dir(cfg, model_dir);
  TrainedClassifier c = load_classifier(md);
  const SplitData s = prepare_split(cfg);

  std::ostringstream tsv;
  tsv << "probability\taccuracy\tmean_r_f\tmean_r_dp\teffective_"
         "depolarization\n";
  json rows = json::array();
  for (double p : grid) {
    NoiseModel nm;
    nm.per_gate = {NoiseChannel{channel, p}};
    nm.readout_flip = cfg.noise.readout_flip;
    nm.final_depolarizing = cfg.noise.final_depolarizing;
    try {
      nm.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: sweep grid: ") + e.what());
    }
    c.set_noise(nm);

    Evaluation ev =
        c.evaluate(s.test.images, s.test.labels, std::nullopt, 0, cfg.threads);
    const double p_eff =
        effective_depolarization(nm, int(c.gates_per_forward()));
    certify_records(ev.records, p_eff, cfg.certify.level, cfg.threads);

    std::vector<double> rfs, rdps;
    for (const PredictionRecord& r : ev.records) {
      rfs.push_back(r.r_f);
      rdps.push_back(r.r_dp);
    }
    const double mrf = mean_of(rfs);
    const double mrdp = mean_of(rdps);
    rows.push_back({{"probability", p},
                    {"accuracy", ev.accuracy},
                    {"mean_r_f", mrf},
                    {"mean_r_dp", mrdp},
                    {"effective_depolarization", p_eff}});
    tsv << tsv_cell(p) << "\t" << tsv_cell(ev.accuracy) << "\t"
        << tsv_cell(mrf) << "\t" << tsv_cell(mrdp) << "\t" << tsv_cell(p_eff)
        << "\n";
    std::cout << "sweep: p=" << p << " accuracy=" << ev.accuracy
              << " mean_r_f=" << mrf << " mean_r_dp=" << mrdp << "\n";
  }

  const std::string dir = cfg.out_dir + "/sweep";
  ensure_dir(dir);
  write_text_file(dir + "/sweep.tsv", tsv.str());

  json report = base_report(cfg, "noise-sweep");
  report["model_dir"] = md;
  report["channel"] = channel_kind_name(channel);
  report["rows"] = rows;
  save_json_file(report, dir + "/report.json");
  write_timing_sidecar(dir, "noise-sweep", seconds_since(t0));
  return 0;
}

}  // namespace qaml
