#include "qaml/cqc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qaml/errors.hpp"
#include "qaml/parallel.hpp"
#include "qaml/rng.hpp"
#include "qaml/serde.hpp"

namespace qaml {

namespace {

long head_param_count(const CqcModel& model) {
  if (model.head != CqcHead::SoftmaxFc) return 0;
  return static_cast<long>(model.fc_weight.size()) +
         static_cast<long>(model.fc_bias.size());
}

}  // namespace

long CqcModel::param_count() const {
  long total = 0;
  for (const auto& layer : layers) total += layer.param_count();
  return total + head_param_count(*this);
}

long CqcModel::gates_per_forward() const {
  long total = 0;
  for (const auto& layer : layers) {
    total += static_cast<long>(layer.out_height) * layer.out_width *
             layer.depth;
  }
  return ansatz == DraAnsatz::ZyPair ? 2 * total : total;
}

void check_model(const CqcModel& model) {
  if (model.layers.empty()) {
    throw std::invalid_argument("cqc: model needs at least one layer");
  }
  if (model.weights.size() != model.layers.size()) {
    throw std::invalid_argument("cqc: one weight stack required per layer");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const CqcLayerSpec& spec = model.layers[l];
    if (spec.in_height < 1 || spec.in_width < 1 || spec.out_height < 1 ||
        spec.out_width < 1) {
      throw std::invalid_argument("cqc: layer dimensions must be >= 1");
    }
    if (spec.field_radius < 0) {
      throw std::invalid_argument("cqc: field_radius must be >= 0");
    }
    if (spec.depth < 1) {
      throw std::invalid_argument("cqc: depth must be >= 1");
    }
    if (l > 0) {
      const CqcLayerSpec& prev = model.layers[l - 1];
      if (spec.in_height != prev.out_height ||
          spec.in_width != prev.out_width) {
        throw std::invalid_argument(
            "cqc: layer " + std::to_string(l) +
            " input does not match the previous layer's output grid");
      }
    }
    const auto& windows = model.weights[l];
    if (static_cast<int>(windows.size()) != spec.depth) {
      throw std::invalid_argument("cqc: layer " + std::to_string(l) +
                                  " needs one weight window per gate");
    }
    for (const auto& w : windows) {
      if (w.rows() != spec.field_side() || w.cols() != spec.field_side()) {
        throw std::invalid_argument(
            "cqc: layer " + std::to_string(l) + " weight windows must be " +
            std::to_string(spec.field_side()) + "x" +
            std::to_string(spec.field_side()));
      }
    }
  }
  if (model.num_classes < 2) {
    throw std::invalid_argument("cqc: num_classes must be >= 2");
  }
  const CqcLayerSpec& last = model.layers.back();
  if (static_cast<long>(last.out_height) * last.out_width <
      model.num_classes) {
    throw std::invalid_argument(
        "cqc: final grid has fewer qubits than classes");
  }
  if (model.head == CqcHead::SoftmaxFc) {
    if (model.fc_weight.rows() != model.num_classes ||
        model.fc_weight.cols() != model.num_classes ||
        model.fc_bias.size() != model.num_classes) {
      throw std::invalid_argument(
          "cqc: softmax_fc head needs a num_classes x num_classes weight "
          "matrix and a num_classes bias");
    }
  }
  model.noise.validate();
}

int cell_center(int h, int in, int out) {
  const double pos = (h + 0.5) * static_cast<double>(in) / out - 0.5;
  return static_cast<int>(std::lround(pos));
}

std::vector<int> layer_centers(int in, int out) {
  std::vector<int> centers(static_cast<std::size_t>(out));
  for (int h = 0; h < out; ++h) centers[std::size_t(h)] = cell_center(h, in, out);
  return centers;
}

double patch_angle(const Eigen::MatrixXd& tensor, int center_row,
                   int center_col, const Eigen::MatrixXd& window) {
  if (window.rows() != window.cols() || window.rows() % 2 == 0) {
    throw std::invalid_argument(
        "patch_angle: weight window must be square with odd side");
  }
  const int radius = static_cast<int>(window.rows() / 2);
  double angle = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const int row = center_row + i;
    if (row < 0 || row >= tensor.rows()) continue;  // zero padding
    for (int j = -radius; j <= radius; ++j) {
      const int col = center_col + j;
      if (col < 0 || col >= tensor.cols()) continue;
      angle += window(i + radius, j + radius) * tensor(row, col);
    }
  }
  return angle;
}

double qubit_forward(const std::vector<double>& angles, DraAnsatz ansatz,
                     const QubitState& projection, const NoiseModel& noise,
                     bool final_layer) {
  if (angles.empty()) {
    throw std::invalid_argument("qubit_forward: need at least one gate");
  }
  QubitState state = ground_state();
  int k = 1;
  for (const double angle : angles) {
    if (ansatz == DraAnsatz::Alternating) {
      // 1-indexed parity: odd sub-layers rotate about z, even about y.
      const Axis axis = (k % 2 == 1) ? Axis::Z : Axis::Y;
      state = apply_gate_noise(apply_rotation(state, axis, angle), noise);
    } else {
      state = apply_gate_noise(apply_rotation(state, Axis::Y, angle), noise);
      state = apply_gate_noise(apply_rotation(state, Axis::Z, angle), noise);
    }
    ++k;
  }
  // The end-of-circuit channel models smoothing right before the measured
  // readout, so only the last layer's qubits see it.
  if (final_layer) state = apply_final_noise(state, noise);
  const double p = projection_probability(state, projection);
  // Every cell is physically read out to produce the next tensor, so the
  // classical flip applies at each cell, not just the final layer.
  return flip_probability(p, noise.readout_flip);
}

Eigen::MatrixXd layer_forward(const CqcLayerSpec& spec,
                              const std::vector<Eigen::MatrixXd>& windows,
                              DraAnsatz ansatz, const NoiseModel& noise,
                              const Eigen::MatrixXd& input, bool final_layer) {
  if (input.rows() != spec.in_height || input.cols() != spec.in_width) {
    throw std::invalid_argument(
        "layer_forward: input is " + std::to_string(input.rows()) + "x" +
        std::to_string(input.cols()) + ", layer expects " +
        std::to_string(spec.in_height) + "x" + std::to_string(spec.in_width));
  }
  if (static_cast<int>(windows.size()) != spec.depth) {
    throw std::invalid_argument(
        "layer_forward: need one weight window per gate");
  }
  const std::vector<int> row_centers =
      layer_centers(spec.in_height, spec.out_height);
  const std::vector<int> col_centers =
      layer_centers(spec.in_width, spec.out_width);

  Eigen::MatrixXd out(spec.out_height, spec.out_width);
  std::vector<double> angles(static_cast<std::size_t>(spec.depth), 0.0);
  for (int h = 0; h < spec.out_height; ++h) {
    for (int w = 0; w < spec.out_width; ++w) {
      for (int k = 0; k < spec.depth; ++k) {
        angles[std::size_t(k)] =
            patch_angle(input, row_centers[std::size_t(h)],
                        col_centers[std::size_t(w)], windows[std::size_t(k)]);
      }
      out(h, w) = qubit_forward(angles, ansatz, spec.projection_state, noise,
                                final_layer);
    }
  }
  return out;
}

Eigen::VectorXd cqc_readout(const CqcModel& model,
                            const Eigen::MatrixXd& image) {
  check_model(model);
  Eigen::MatrixXd tensor = image;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const bool final_layer = (l + 1 == model.layers.size());
    tensor = layer_forward(model.layers[l], model.weights[l], model.ansatz,
                           model.noise, tensor, final_layer);
  }
  Eigen::VectorXd readout(model.num_classes);
  for (int c = 0; c < model.num_classes; ++c) {
    readout[c] = tensor(c / tensor.cols(), c % tensor.cols());
  }
  return readout;
}

Eigen::VectorXd cqc_forward(const CqcModel& model,
                            const Eigen::MatrixXd& image) {
  const Eigen::VectorXd readout = cqc_readout(model, image);
  if (model.head == CqcHead::Normalize) {
    const double total = readout.sum();
    if (total <= 0.0) {
      // All readouts zero (e.g. blank input with a |1> projection): the
      // continuous extension of x / sum(x) as all entries vanish together.
      return Eigen::VectorXd::Constant(model.num_classes,
                                       1.0 / model.num_classes);
    }
    return readout / total;
  }
  Eigen::VectorXd logits = model.fc_weight * readout + model.fc_bias;
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd probs = logits.array().exp();
  return probs / probs.sum();
}

int cqc_predict(const CqcModel& model, const Eigen::MatrixXd& image) {
  return argmax_class(cqc_forward(model, image));
}

Eigen::VectorXd pack_weights(const CqcModel& model) {
  Eigen::VectorXd flat(model.param_count());
  long at = 0;
  for (const auto& windows : model.weights) {
    for (const auto& w : windows) {
      for (long i = 0; i < w.rows(); ++i) {
        for (long j = 0; j < w.cols(); ++j) flat[at++] = w(i, j);
      }
    }
  }
  if (model.head == CqcHead::SoftmaxFc) {
    for (long i = 0; i < model.fc_weight.rows(); ++i) {
      for (long j = 0; j < model.fc_weight.cols(); ++j) {
        flat[at++] = model.fc_weight(i, j);
      }
    }
    for (long i = 0; i < model.fc_bias.size(); ++i) {
      flat[at++] = model.fc_bias[i];
    }
  }
  return flat;
}

void unpack_weights(CqcModel& model, const Eigen::VectorXd& flat) {
  if (flat.size() != model.param_count()) {
    throw std::invalid_argument(
        "unpack_weights: expected " + std::to_string(model.param_count()) +
        " parameters, got " + std::to_string(flat.size()));
  }
  long at = 0;
  for (auto& windows : model.weights) {
    for (auto& w : windows) {
      for (long i = 0; i < w.rows(); ++i) {
        for (long j = 0; j < w.cols(); ++j) w(i, j) = flat[at++];
      }
    }
  }
  if (model.head == CqcHead::SoftmaxFc) {
    for (long i = 0; i < model.fc_weight.rows(); ++i) {
      for (long j = 0; j < model.fc_weight.cols(); ++j) {
        model.fc_weight(i, j) = flat[at++];
      }
    }
    for (long i = 0; i < model.fc_bias.size(); ++i) {
      model.fc_bias[i] = flat[at++];
    }
  }
}

CqcModel fig4_architecture(int num_classes, int depth) {
  if (num_classes < 2 || num_classes > 9) {
    throw std::invalid_argument(
        "fig4_architecture: the 3x3 readout grid supports 2..9 classes");
  }
  if (depth < 1) {
    throw std::invalid_argument("fig4_architecture: depth must be >= 1");
  }
  CqcModel model;
  CqcLayerSpec first;
  first.in_height = 28;
  first.in_width = 28;
  first.out_height = 7;
  first.out_width = 7;
  first.field_radius = 1;
  first.depth = depth;
  CqcLayerSpec second = first;
  second.in_height = 7;
  second.in_width = 7;
  second.out_height = 3;
  second.out_width = 3;
  model.layers = {first, second};
  for (const auto& layer : model.layers) {
    model.weights.emplace_back(
        static_cast<std::size_t>(layer.depth),
        Eigen::MatrixXd::Zero(layer.field_side(), layer.field_side()));
  }
  model.num_classes = num_classes;
  return model;
}

Evaluation cqc_evaluate(const CqcModel& model,
                        const std::vector<ImageTensor>& images,
                        const std::vector<int>& labels,
                        std::optional<long> shots, uint64_t seed,
                        int threads) {
  if (images.empty()) {
    throw std::invalid_argument("cqc_evaluate: empty dataset");
  }
  if (images.size() != labels.size()) {
    throw std::invalid_argument("cqc_evaluate: image/label count mismatch");
  }
  check_model(model);

  Evaluation out;
  out.records.resize(images.size());
  const uint64_t eval_seed = seed_for(seed, "cqc-eval");
  parallel_for(static_cast<long>(images.size()), threads, [&](long i) {
    const Eigen::VectorXd probs = cqc_forward(model, images[std::size_t(i)].values);
    out.records[std::size_t(i)] = record_from_probs(
        probs, labels[std::size_t(i)], shots, seed_for(eval_seed, uint64_t(i)));
  });

  long correct = 0;
  for (const auto& r : out.records) correct += r.correct() ? 1 : 0;
  out.accuracy = double(correct) / double(out.records.size());
  return out;
}

void save_cqc(const CqcModel& model, const std::string& path) {
  json layers = json::array();
  for (const auto& spec : model.layers) {
    const Eigen::Vector3d bloch = bloch_vector(spec.projection_state);
    layers.push_back({{"in_height", spec.in_height},
                      {"in_width", spec.in_width},
                      {"out_height", spec.out_height},
                      {"out_width", spec.out_width},
                      {"field_radius", spec.field_radius},
                      {"depth", spec.depth},
                      {"projection", {bloch[0], bloch[1], bloch[2]}}});
  }
  json weights = json::array();
  for (const auto& windows : model.weights) {
    json stack = json::array();
    for (const auto& w : windows) stack.push_back(matrix_to_json(w));
    weights.push_back(stack);
  }
  json j{{"format", "qaml-cqc"},
         {"version", 1},
         {"ansatz",
          model.ansatz == DraAnsatz::Alternating ? "alternating" : "zy_pair"},
         {"head",
          model.head == CqcHead::Normalize ? "normalize" : "softmax_fc"},
         {"num_classes", model.num_classes},
         {"layers", layers},
         {"weights", weights},
         {"noise", noise_to_json(model.noise)}};
  if (model.head == CqcHead::SoftmaxFc) {
    j["fc_weight"] = matrix_to_json(model.fc_weight);
    j["fc_bias"] = vector_to_json(model.fc_bias);
  }
  save_json_file(j, path);
}

CqcModel load_cqc(const std::string& path) {
  const json j = load_json_file(path);
  try {
    if (j.at("format") != "qaml-cqc") {
      throw FormatError("not a cqc model file: " + path);
    }
    if (j.at("version").get<int>() != 1) {
      throw FormatError("unsupported cqc model version in " + path);
    }
    CqcModel m;
    const std::string ansatz = j.at("ansatz");
    if (ansatz == "alternating") {
      m.ansatz = DraAnsatz::Alternating;
    } else if (ansatz == "zy_pair") {
      m.ansatz = DraAnsatz::ZyPair;
    } else {
      throw FormatError("unknown ansatz tag: " + ansatz);
    }
    const std::string head = j.at("head");
    if (head == "normalize") {
      m.head = CqcHead::Normalize;
    } else if (head == "softmax_fc") {
      m.head = CqcHead::SoftmaxFc;
    } else {
      throw FormatError("unknown head tag: " + head);
    }
    m.num_classes = j.at("num_classes").get<int>();
    for (const auto& spec_json : j.at("layers")) {
      CqcLayerSpec spec;
      spec.in_height = spec_json.at("in_height").get<int>();
      spec.in_width = spec_json.at("in_width").get<int>();
      spec.out_height = spec_json.at("out_height").get<int>();
      spec.out_width = spec_json.at("out_width").get<int>();
      spec.field_radius = spec_json.at("field_radius").get<int>();
      spec.depth = spec_json.at("depth").get<int>();
      const auto& b = spec_json.at("projection");
      if (!b.is_array() || b.size() != 3) {
        throw FormatError("projection state must be a Bloch 3-vector");
      }
      spec.projection_state = state_from_bloch(
          {b[0].get<double>(), b[1].get<double>(), b[2].get<double>()});
      m.layers.push_back(spec);
    }
    for (const auto& stack_json : j.at("weights")) {
      std::vector<Eigen::MatrixXd> stack;
      for (const auto& w : stack_json) stack.push_back(matrix_from_json(w));
      m.weights.push_back(std::move(stack));
    }
    m.noise = noise_from_json(j.at("noise"));
    if (m.head == CqcHead::SoftmaxFc) {
      m.fc_weight = matrix_from_json(j.at("fc_weight"));
      m.fc_bias = vector_from_json(j.at("fc_bias"));
    }
    check_model(m);
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad cqc model json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad cqc model: ") + e.what());
  }
}

}  // namespace qaml
