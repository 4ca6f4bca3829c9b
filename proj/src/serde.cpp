#include "qaml/serde.hpp"

#include <fstream>

#include "qaml/errors.hpp"

namespace qaml {

std::string channel_kind_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Depolarizing:
      return "depolarizing";
    case ChannelKind::BitFlip:
      return "bit_flip";
    case ChannelKind::PhaseFlip:
      return "phase_flip";
  }
  throw FormatError("unknown channel kind");
}

ChannelKind channel_kind_from_name(const std::string& name) {
  if (name == "depolarizing") return ChannelKind::Depolarizing;
  if (name == "bit_flip") return ChannelKind::BitFlip;
  if (name == "phase_flip") return ChannelKind::PhaseFlip;
  throw FormatError("unknown noise channel kind: " + name);
}

json noise_to_json(const NoiseModel& model) {
  json channels = json::array();
  for (const auto& c : model.per_gate) {
    channels.push_back(
        {{"kind", channel_kind_name(c.kind)}, {"probability", c.probability}});
  }
  return {{"per_gate", channels},
          {"readout_flip", model.readout_flip},
          {"final_depolarizing", model.final_depolarizing}};
}

NoiseModel noise_from_json(const json& j) {
  try {
    NoiseModel m;
    for (const auto& c : j.value("per_gate", json::array())) {
      m.per_gate.push_back({channel_kind_from_name(c.at("kind")),
                            c.at("probability").get<double>()});
    }
    m.readout_flip = j.value("readout_flip", 0.0);
    m.final_depolarizing = j.value("final_depolarizing", 0.0);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad noise model json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad noise model: ") + e.what());
  }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  try {
    const long rows = long(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const long cols = long(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (long i = 0; i < rows; ++i) {
      if (long(j.at(std::size_t(i)).size()) != cols) {
        throw FormatError("ragged matrix json");
      }
      for (long k = 0; k < cols; ++k) {
        m(i, k) = j.at(std::size_t(i)).at(std::size_t(k)).get<double>();
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad matrix json: ") + e.what());
  }
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  try {
    Eigen::VectorXd v(long(j.size()));
    for (long i = 0; i < v.size(); ++i) {
      v[i] = j.at(std::size_t(i)).get<double>();
    }
    return v;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad vector json: ") + e.what());
  }
}

json label_states_to_json(const std::vector<QubitState>& states) {
  json a = json::array();
  for (const auto& s : states) {
    const Eigen::Vector3d b = bloch_vector(s);
    a.push_back({b[0], b[1], b[2]});
  }
  return a;
}

std::vector<QubitState> label_states_from_json(const json& j) {
  try {
    std::vector<QubitState> states;
    for (const auto& entry : j) {
      if (entry.size() != 3) throw FormatError("bloch vector needs 3 entries");
      states.push_back(state_from_bloch(Eigen::Vector3d(
          entry.at(0).get<double>(), entry.at(1).get<double>(),
          entry.at(2).get<double>())));
    }
    return states;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad label states json: ") + e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError("json parse failure in " + path + ": " + e.what());
  }
}

void save_json_file(const json& j, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
  if (!f) throw FormatError("write failed: " + path);
}

}  // namespace qaml
