#include "qaml/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace qaml {

namespace {

void check_probability(double p, const char* where) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(where) +
                                ": probability outside [0, 1]");
}

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

std::vector<Eigen::Matrix2cd> kraus_operators(const NoiseChannel& channel) {
  check_probability(channel.probability, "kraus_operators");
  const double p = channel.probability;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  switch (channel.kind) {
    case ChannelKind::Depolarizing:
      // (1-p) rho + p I/2, written as the uniform Pauli mixture.
      return {std::sqrt(1.0 - 0.75 * p) * id, std::sqrt(0.25 * p) * pauli_x(),
              std::sqrt(0.25 * p) * pauli_y(), std::sqrt(0.25 * p) * pauli_z()};
    case ChannelKind::BitFlip:
      return {std::sqrt(1.0 - p) * id, std::sqrt(p) * pauli_x()};
    case ChannelKind::PhaseFlip:
      return {std::sqrt(1.0 - p) * id, std::sqrt(p) * pauli_z()};
  }
  throw std::invalid_argument("kraus_operators: unknown channel kind");
}

QubitState apply_channel(const QubitState& rho, const NoiseChannel& channel) {
  check_probability(channel.probability, "apply_channel");
  const double p = channel.probability;
  switch (channel.kind) {
    case ChannelKind::Depolarizing:
      return (1.0 - p) * rho + (0.5 * p) * QubitState::Identity();
    case ChannelKind::BitFlip: {
      const Eigen::Matrix2cd x = pauli_x();
      return (1.0 - p) * rho + p * (x * rho * x);
    }
    case ChannelKind::PhaseFlip: {
      const Eigen::Matrix2cd z = pauli_z();
      return (1.0 - p) * rho + p * (z * rho * z);
    }
  }
  throw std::invalid_argument("apply_channel: unknown channel kind");
}

void NoiseModel::validate() const {
  for (const auto& ch : per_gate)
    check_probability(ch.probability, "NoiseModel.per_gate");
  check_probability(readout_flip, "NoiseModel.readout_flip");
  check_probability(final_depolarizing, "NoiseModel.final_depolarizing");
}

NoiseModel device_like_noise() {
  NoiseModel m;
  m.per_gate = {{ChannelKind::Depolarizing, 0.01},
                {ChannelKind::BitFlip, 0.005},
                {ChannelKind::PhaseFlip, 0.005}};
  m.readout_flip = 0.01;
  return m;
}

QubitState apply_gate_noise(const QubitState& rho, const NoiseModel& model) {
  QubitState out = rho;
  for (const auto& ch : model.per_gate) out = apply_channel(out, ch);
  return out;
}

QubitState apply_final_noise(const QubitState& rho, const NoiseModel& model) {
  if (model.final_depolarizing == 0.0) return rho;
  return apply_channel(rho,
                       {ChannelKind::Depolarizing, model.final_depolarizing});
}

double flip_probability(double p, double readout_flip) {
  return p * (1.0 - readout_flip) + (1.0 - p) * readout_flip;
}

double effective_depolarization(const NoiseModel& model, int gates) {
  double keep = 1.0 - model.final_depolarizing;
  for (const auto& ch : model.per_gate)
    if (ch.kind == ChannelKind::Depolarizing)
      keep *= std::pow(1.0 - ch.probability, gates);
  return 1.0 - keep;
}

}  // namespace qaml
