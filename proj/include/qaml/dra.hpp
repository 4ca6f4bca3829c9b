#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qaml/noise.hpp"
#include "qaml/qubit.hpp"
#include "qaml/records.hpp"

namespace qaml {

// Two ansatz readings of the paper's construction:
//   alternating — one rotation per layer, Rz for odd layers, Ry for even
//                 (layers are 1-indexed; layer 1 is odd, hence Rz);
//   zy_pair     — Ry then Rz per layer, both with the same angle.
enum class DraAnsatz { Alternating, ZyPair };

struct DraModel {
  int layers = 7;
  DraAnsatz ansatz = DraAnsatz::Alternating;
  // One row per tie group; layer l (1-indexed) uses row (l-1) mod rows.
  // Untied models have exactly `layers` rows. Row length = feature_dim + 1
  // (the trailing slot multiplies the bias 1).
  Eigen::MatrixXd theta;
  std::vector<QubitState> label_states;
  NoiseModel noise;

  int feature_dim() const { return int(theta.cols()) - 1; }
  int num_classes() const { return int(label_states.size()); }
  long param_count() const { return theta.size(); }
  int gates_per_forward() const {
    return ansatz == DraAnsatz::Alternating ? layers : 2 * layers;
  }
};

// Appends the bias 1.
Eigen::VectorXd augment(const Eigen::VectorXd& features);

// N maximally separated pure label states: N=2 poles, N=3 a 120-degree fan
// on the x-z great circle, N=4 tetrahedral vertices.
std::vector<QubitState> label_states_for(int num_classes);

// The encoded state after all layers and gate/final noise, before
// measurement. Throws std::invalid_argument on dimension mismatch.
QubitState dra_encode(const DraModel& model, const Eigen::VectorXd& features);

// Projection probabilities of a prepared state onto the label states,
// readout flip applied, renormalized to sum to 1.
Eigen::VectorXd dra_measure(const DraModel& model, const QubitState& state);

// measure(encode(x)).
Eigen::VectorXd dra_forward(const DraModel& model,
                            const Eigen::VectorXd& features);

// Argmax with ties broken toward the lowest class index.
int dra_predict(const DraModel& model, const Eigen::VectorXd& features);
int argmax_class(const Eigen::VectorXd& probabilities);

// Row i of `features` is one sample. With `shots` set, per-class
// probabilities are finite-shot estimates drawn through qsim sampling on a
// per-sample stream derived from `seed`; exact mode ignores `seed`.
Evaluation dra_evaluate(const DraModel& model, const Eigen::MatrixXd& features,
                        const std::vector<int>& labels,
                        std::optional<long> shots = std::nullopt,
                        uint64_t seed = 0, int threads = 1);

// Versioned JSON persistence (ansatz tag, layers, theta, label states as
// Bloch vectors, noise).
void save_dra(const DraModel& model, const std::string& path);
DraModel load_dra(const std::string& path);

}  // namespace qaml
