#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qaml/dra.hpp"
#include "qaml/image.hpp"
#include "qaml/noise.hpp"
#include "qaml/qubit.hpp"
#include "qaml/records.hpp"

namespace qaml {

// One convolutional layer of single-qubit cells: an in_height x in_width
// activation tensor is reduced to an out_height x out_width tensor.  Every
// output cell owns one qubit driven by `depth` data re-uploading gates whose
// angles are inner products of a shared (2*field_radius+1)^2 weight window
// with the receptive field around the cell's centre.
struct CqcLayerSpec {
  int in_height = 0;
  int in_width = 0;
  int out_height = 0;
  int out_width = 0;
  int field_radius = 1;  // square field: (2r+1) x (2r+1)
  int depth = 1;         // number of gates per qubit (K)
  // Pure state whose overlap with the evolved qubit becomes the cell's
  // activation.  Defaults to |1>.
  QubitState projection_state = state_from_bloch({0.0, 0.0, -1.0});

  int field_side() const { return 2 * field_radius + 1; }
  // Trainable weights in this layer: depth windows, shared by all cells.
  long param_count() const {
    return static_cast<long>(depth) * field_side() * field_side();
  }
};

enum class CqcHead {
  Normalize,  // divide the readout vector by its sum
  SoftmaxFc,  // trainable affine map over the readouts, then softmax
};

struct CqcModel {
  std::vector<CqcLayerSpec> layers;
  // weights[l][k] is the field_side x field_side window for gate k of
  // layer l, shared across all of that layer's qubits.
  std::vector<std::vector<Eigen::MatrixXd>> weights;
  // Gate alternation rule.  Alternating: gate k applies Rz for odd k and Ry
  // for even k (k starting at 1).  ZyPair: each k applies Ry then Rz with the
  // same angle.
  DraAnsatz ansatz = DraAnsatz::Alternating;
  CqcHead head = CqcHead::Normalize;
  int num_classes = 2;
  NoiseModel noise;
  // SoftmaxFc parameters (empty otherwise): logits = fc_weight * r + fc_bias
  // where r is the readout vector.
  Eigen::MatrixXd fc_weight;
  Eigen::VectorXd fc_bias;

  long param_count() const;
  // Gates applied on one full forward pass (all cells of all layers),
  // counting a ZyPair step as two gates.
  long gates_per_forward() const;
};

// Throws std::invalid_argument when the layer stack is empty, dimensions do
// not chain, a layer is degenerate, or head/num_classes are inconsistent
// with the final grid.
void check_model(const CqcModel& model);

// Centre of output cell h along an axis mapped from `out` cells back onto
// `in` cells: round((h + 0.5) * in / out - 0.5), half away from zero.
int cell_center(int h, int in, int out);
std::vector<int> layer_centers(int in, int out);

// Inner product of `window` with the receptive field of `tensor` centred at
// (center_row, center_col); positions outside the tensor contribute zero.
double patch_angle(const Eigen::MatrixXd& tensor, int center_row,
                   int center_col, const Eigen::MatrixXd& window);

// Runs one cell's qubit from |0><0| through the layer's gate sequence with
// per-gate noise, optionally the end-of-circuit channel, and returns the
// projection probability onto `projection` (readout flip included).
double qubit_forward(const std::vector<double>& angles, DraAnsatz ansatz,
                     const QubitState& projection, const NoiseModel& noise,
                     bool final_layer);

// Maps the input tensor through one layer.  `final_layer` controls whether
// the end-of-circuit noise channel is applied before projection.
Eigen::MatrixXd layer_forward(const CqcLayerSpec& spec,
                              const std::vector<Eigen::MatrixXd>& windows,
                              DraAnsatz ansatz, const NoiseModel& noise,
                              const Eigen::MatrixXd& input, bool final_layer);

// Readout vector: the first num_classes cells of the final tensor in
// row-major order (remaining cells are ancilla).
Eigen::VectorXd cqc_readout(const CqcModel& model,
                            const Eigen::MatrixXd& image);

// Class probability vector (sums to 1).
Eigen::VectorXd cqc_forward(const CqcModel& model,
                            const Eigen::MatrixXd& image);

int cqc_predict(const CqcModel& model, const Eigen::MatrixXd& image);

// Flat views of every trainable parameter (layer windows in layer order,
// each window row-major across its gates, then fc weight row-major and fc
// bias when the head is SoftmaxFc).  Used by genome-based training.
Eigen::VectorXd pack_weights(const CqcModel& model);
void unpack_weights(CqcModel& model, const Eigen::VectorXd& flat);

// Two-layer architecture 28x28 -> 7x7 -> 3x3 with 3x3 fields, projection
// |1>, Normalize head.  `depth` gates per qubit in both layers (default 5).
CqcModel fig4_architecture(int num_classes, int depth = 5);

// Evaluates images (each row-major 28x28 etc. as ImageTensor) against
// labels.  Shot mode draws per-class estimates through qsim sampling on a
// per-sample stream derived from `seed`.
Evaluation cqc_evaluate(const CqcModel& model,
                        const std::vector<ImageTensor>& images,
                        const std::vector<int>& labels,
                        std::optional<long> shots, uint64_t seed,
                        int threads = 1);

void save_cqc(const CqcModel& model, const std::string& path);
CqcModel load_cqc(const std::string& path);

}  // namespace qaml
