#pragma once

#include <Eigen/Dense>

namespace qaml {

// Single-qubit states are 2x2 complex density matrices throughout; pure
// states are density matrices with unit purity. Valid states are Hermitian,
// unit-trace and positive semidefinite.
using QubitState = Eigen::Matrix2cd;

enum class Axis { Y, Z };

// |0><0|
QubitState ground_state();

// rho = |psi><psi| from amplitudes (normalized internally).
QubitState pure_state(const Eigen::Vector2cd& amplitudes);

// Bloch representation: rho = (I + s . sigma) / 2, |s| <= 1.
Eigen::Vector3d bloch_vector(const QubitState& state);
QubitState state_from_bloch(const Eigen::Vector3d& s);

double purity(const QubitState& state);  // Tr(rho^2)

// For qubits this equals half the Euclidean distance of Bloch vectors.
double trace_distance(const QubitState& a, const QubitState& b);

bool is_valid_density(const QubitState& state, double tol = 1e-12);
bool is_pure(const QubitState& state, double tol = 1e-9);

// U rho U^dag with U = exp(-i * angle * sigma_axis / 2).
// Throws std::invalid_argument for non-finite angles.
QubitState apply_rotation(const QubitState& state, Axis axis, double angle);

// Tr(rho |psi><psi|). label_state must be pure.
double projection_probability(const QubitState& state,
                              const QubitState& label_state);

}  // namespace qaml
