#include "qaml/dra.hpp"

#include <cmath>
#include <stdexcept>

#include "qaml/errors.hpp"
#include "qaml/parallel.hpp"
#include "qaml/rng.hpp"
#include "qaml/serde.hpp"

namespace qaml {

namespace {

void check_model(const DraModel& model) {
  if (model.layers < 1) throw std::invalid_argument("dra: layers must be >= 1");
  if (model.theta.rows() < 1 || model.theta.rows() > model.layers) {
    throw std::invalid_argument(
        "dra: theta must have between 1 and `layers` rows");
  }
  if (model.label_states.size() < 2) {
    throw std::invalid_argument("dra: need at least two label states");
  }
}

}  // namespace

Eigen::VectorXd augment(const Eigen::VectorXd& features) {
  Eigen::VectorXd out(features.size() + 1);
  out.head(features.size()) = features;
  out[features.size()] = 1.0;
  return out;
}

std::vector<QubitState> label_states_for(int num_classes) {
  switch (num_classes) {
    case 2:
      return {state_from_bloch({0, 0, 1}), state_from_bloch({0, 0, -1})};
    case 3: {
      // 120 degrees apart on the x-z great circle, starting at |0>.
      const double s = std::sqrt(3.0) / 2.0;
      return {state_from_bloch({0, 0, 1}), state_from_bloch({s, 0, -0.5}),
              state_from_bloch({-s, 0, -0.5})};
    }
    case 4: {
      // Tetrahedron: pairwise Bloch overlaps of -1/3.
      const double a = 2.0 * std::sqrt(2.0) / 3.0;
      const double b = std::sqrt(2.0) / 3.0;
      const double c = std::sqrt(2.0 / 3.0);
      return {state_from_bloch({0, 0, 1}), state_from_bloch({a, 0, -1.0 / 3}),
              state_from_bloch({-b, c, -1.0 / 3}),
              state_from_bloch({-b, -c, -1.0 / 3})};
    }
    default:
      throw std::invalid_argument(
          "label_states_for: supported class counts are 2, 3, 4");
  }
}

QubitState dra_encode(const DraModel& model, const Eigen::VectorXd& features) {
  check_model(model);
  if (features.size() + 1 != model.theta.cols()) {
    throw std::invalid_argument(
        "dra_encode: feature length " + std::to_string(features.size()) +
        " does not match theta row length " +
        std::to_string(model.theta.cols()) + " - 1");
  }
  const Eigen::VectorXd x = augment(features);
  const long groups = model.theta.rows();

  QubitState state = ground_state();
  for (int l = 1; l <= model.layers; ++l) {
    const double angle = model.theta.row((l - 1) % groups).dot(x);
    if (model.ansatz == DraAnsatz::Alternating) {
      // 1-indexed parity: odd layers rotate about z, even about y.
      const Axis axis = (l % 2 == 1) ? Axis::Z : Axis::Y;
      state = apply_gate_noise(apply_rotation(state, axis, angle), model.noise);
    } else {
      state = apply_gate_noise(apply_rotation(state, Axis::Y, angle),
                               model.noise);
      state = apply_gate_noise(apply_rotation(state, Axis::Z, angle),
                               model.noise);
    }
  }
  return apply_final_noise(state, model.noise);
}

Eigen::VectorXd dra_measure(const DraModel& model, const QubitState& state) {
  const int n = model.num_classes();
  Eigen::VectorXd probs(n);
  for (int c = 0; c < n; ++c) {
    const double p = projection_probability(state, model.label_states[c]);
    probs[c] = flip_probability(p, model.noise.readout_flip);
  }
  const double total = probs.sum();
  if (total <= 0.0) {
    throw EvalError("dra_measure: degenerate projection sum");
  }
  return probs / total;
}

Eigen::VectorXd dra_forward(const DraModel& model,
                            const Eigen::VectorXd& features) {
  return dra_measure(model, dra_encode(model, features));
}

int argmax_class(const Eigen::VectorXd& probabilities) {
  int best = 0;
  for (int c = 1; c < probabilities.size(); ++c) {
    if (probabilities[c] > probabilities[best]) best = c;
  }
  return best;
}

int dra_predict(const DraModel& model, const Eigen::VectorXd& features) {
  return argmax_class(dra_forward(model, features));
}

Evaluation dra_evaluate(const DraModel& model, const Eigen::MatrixXd& features,
                        const std::vector<int>& labels,
                        std::optional<long> shots, uint64_t seed,
                        int threads) {
  if (features.rows() == 0) {
    throw std::invalid_argument("dra_evaluate: empty dataset");
  }
  if (features.rows() != long(labels.size())) {
    throw std::invalid_argument("dra_evaluate: feature/label count mismatch");
  }

  Evaluation out;
  out.records.resize(std::size_t(features.rows()));
  const uint64_t eval_seed = seed_for(seed, "dra-eval");
  parallel_for(features.rows(), threads, [&](long i) {
    const Eigen::VectorXd probs =
        dra_forward(model, features.row(i).transpose());
    out.records[std::size_t(i)] = record_from_probs(
        probs, labels[std::size_t(i)], shots, seed_for(eval_seed, uint64_t(i)));
  });

  long correct = 0;
  for (const auto& r : out.records) correct += r.correct() ? 1 : 0;
  out.accuracy = double(correct) / double(out.records.size());
  return out;
}

void save_dra(const DraModel& model, const std::string& path) {
  json j{{"format", "qaml-dra"},
         {"version", 1},
         {"ansatz",
          model.ansatz == DraAnsatz::Alternating ? "alternating" : "zy_pair"},
         {"layers", model.layers},
         {"theta", matrix_to_json(model.theta)},
         {"label_states", label_states_to_json(model.label_states)},
         {"noise", noise_to_json(model.noise)}};
  save_json_file(j, path);
}

DraModel load_dra(const std::string& path) {
  const json j = load_json_file(path);
  try {
    if (j.at("format") != "qaml-dra") {
      throw FormatError("not a dra model file: " + path);
    }
    if (j.at("version").get<int>() != 1) {
      throw FormatError("unsupported dra model version in " + path);
    }
    DraModel m;
    const std::string ansatz = j.at("ansatz");
    if (ansatz == "alternating") {
      m.ansatz = DraAnsatz::Alternating;
    } else if (ansatz == "zy_pair") {
      m.ansatz = DraAnsatz::ZyPair;
    } else {
      throw FormatError("unknown ansatz tag: " + ansatz);
    }
    m.layers = j.at("layers").get<int>();
    m.theta = matrix_from_json(j.at("theta"));
    m.label_states = label_states_from_json(j.at("label_states"));
    m.noise = noise_from_json(j.at("noise"));
    check_model(m);
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad dra model json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad dra model: ") + e.what());
  }
}

}  // namespace qaml
