#include "qaml/qubit.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qaml {

namespace {
const std::complex<double> kI(0.0, 1.0);
}

QubitState ground_state() {
  QubitState rho = QubitState::Zero();
  rho(0, 0) = 1.0;
  return rho;
}

QubitState pure_state(const Eigen::Vector2cd& amplitudes) {
  Eigen::Vector2cd psi = amplitudes.normalized();
  return psi * psi.adjoint();
}

Eigen::Vector3d bloch_vector(const QubitState& rho) {
  return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(),
          (rho(0, 0) - rho(1, 1)).real()};
}

QubitState state_from_bloch(const Eigen::Vector3d& s) {
  QubitState rho;
  rho(0, 0) = 0.5 * (1.0 + s.z());
  rho(1, 1) = 0.5 * (1.0 - s.z());
  rho(0, 1) = 0.5 * std::complex<double>(s.x(), -s.y());
  rho(1, 0) = std::conj(rho(0, 1));
  return rho;
}

double purity(const QubitState& rho) { return (rho * rho).trace().real(); }

double trace_distance(const QubitState& a, const QubitState& b) {
  return 0.5 * (bloch_vector(a) - bloch_vector(b)).norm();
}

bool is_valid_density(const QubitState& rho, double tol) {
  if (!rho.allFinite()) return false;
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol ||
      std::abs(rho.trace().imag()) > tol)
    return false;
  Eigen::SelfAdjointEigenSolver<QubitState> es(rho);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_pure(const QubitState& rho, double tol) {
  return std::abs(purity(rho) - 1.0) <= tol;
}

QubitState apply_rotation(const QubitState& rho, Axis axis, double angle) {
  if (!std::isfinite(angle))
    throw std::invalid_argument("apply_rotation: non-finite angle");
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  QubitState u;
  if (axis == Axis::Y) {
    u << c, -s, s, c;
  } else {
    u << std::complex<double>(c, -s), 0.0, 0.0, std::complex<double>(c, s);
  }
  return u * rho * u.adjoint();
}

double projection_probability(const QubitState& rho,
                              const QubitState& label_state) {
  if (!is_pure(label_state))
    throw std::invalid_argument(
        "projection_probability: label state is not pure");
  double p = (rho * label_state).trace().real();
  // Clamp tiny numerical excursions outside [0, 1].
  return std::min(1.0, std::max(0.0, p));
}

}  // namespace qaml
