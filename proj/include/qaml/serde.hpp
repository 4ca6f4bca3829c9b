#pragma once

// Shared JSON (de)serialization helpers for model and config files.

#include <nlohmann/json.hpp>

#include "qaml/noise.hpp"
#include "qaml/qubit.hpp"

namespace qaml {

using json = nlohmann::json;

std::string channel_kind_name(ChannelKind kind);
ChannelKind channel_kind_from_name(const std::string& name);  // FormatError

json noise_to_json(const NoiseModel& model);
NoiseModel noise_from_json(const json& j);  // FormatError on bad shape

json matrix_to_json(const Eigen::MatrixXd& m);          // array of row arrays
Eigen::MatrixXd matrix_from_json(const json& j);        // FormatError
json vector_to_json(const Eigen::VectorXd& v);          // flat array
Eigen::VectorXd vector_from_json(const json& j);        // FormatError

// Pure states serialize as their Bloch vectors.
json label_states_to_json(const std::vector<QubitState>& states);
std::vector<QubitState> label_states_from_json(const json& j);

// Read/parse with FormatError on I/O or syntax failure.
json load_json_file(const std::string& path);
void save_json_file(const json& j, const std::string& path);

}  // namespace qaml
