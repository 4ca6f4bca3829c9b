// qaml — command-line driver for the single-qubit classifier laboratory.
//
// Exit codes:
//   0  success
//   2  configuration problem (bad config file, bad flags)
//   3  malformed data file (IDX or model bytes)
//   4  evaluation failure
//   1  anything else

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qaml/errors.hpp"
#include "qaml/harness.hpp"
#include "qaml/serde.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFormat = 3;
constexpr int kExitEval = 4;

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string token =
        csv.substr(start, comma == std::string::npos ? comma : comma - start);
    if (token.empty()) {
      throw qaml::ConfigError("config: --grid has an empty entry");
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      throw qaml::ConfigError("config: --grid entry is not a number: " +
                              token);
    }
    if (used != token.size()) {
      throw qaml::ConfigError("config: --grid entry is not a number: " +
                              token);
    }
    grid.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qaml: single-qubit classifiers, adversarial attacks, and "
               "robustness certificates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string model_dir;
  std::string channel_name = "depolarizing";
  std::string grid_csv = "0,0.01,0.02,0.05,0.1,0.2";
  std::optional<uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<long> shots_override;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file (JSON)")
        ->required();
    sub->add_option("--seed", seed_override, "override the config seed");
    sub->add_option("--out", out_override, "override the output directory");
    sub->add_option("--shots", shots_override,
                    "override shots per readout (0 = exact probabilities)");
  };
  const auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", model_dir,
                    "model directory (default: <out_dir>/model)");
  };

  CLI::App* prepare = app.add_subcommand(
      "prepare", "materialize the train/test split as IDX files");
  add_common(prepare);

  CLI::App* train = app.add_subcommand(
      "train", "fit the feature map and evolve the classifier");
  add_common(train);

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a trained model on the test split");
  add_common(eval_cmd);
  add_model(eval_cmd);

  CLI::App* attack = app.add_subcommand(
      "attack", "run the genetic adversarial generator against a model");
  add_common(attack);
  add_model(attack);

  CLI::App* certify = app.add_subcommand(
      "certify", "issue per-sample robustness certificates from shot counts");
  add_common(certify);
  add_model(certify);

  CLI::App* sweep = app.add_subcommand(
      "noise-sweep", "evaluate accuracy and radii across a noise grid");
  add_common(sweep);
  add_model(sweep);
  sweep->add_option("--channel", channel_name,
                    "per-gate channel: depolarizing | bit_flip | phase_flip");
  sweep->add_option("--grid", grid_csv,
                    "comma-separated channel probabilities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    qaml::ExperimentConfig cfg = qaml::load_experiment_config(config_path);
    qaml::apply_overrides(cfg, seed_override, out_override, shots_override);

    if (*prepare) return qaml::cmd_prepare(cfg);
    if (*train) return qaml::cmd_train(cfg);
    if (*eval_cmd) return qaml::cmd_eval(cfg, model_dir);
    if (*attack) return qaml::cmd_attack(cfg, model_dir);
    if (*certify) return qaml::cmd_certify(cfg, model_dir);
    if (*sweep) {
      qaml::ChannelKind channel;
      try {
        channel = qaml::channel_kind_from_name(channel_name);
      } catch (const qaml::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
      }
      return qaml::cmd_noise_sweep(cfg, model_dir, channel,
                                   parse_grid(grid_csv));
    }
    std::cerr << "error: no subcommand selected\n";
    return kExitConfig;
  } catch (const qaml::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qaml::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const qaml::EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEval;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
