#pragma once

#include <vector>

#include "qaml/qubit.hpp"

namespace qaml {

enum class ChannelKind { Depolarizing, BitFlip, PhaseFlip };

struct NoiseChannel {
  ChannelKind kind = ChannelKind::Depolarizing;
  double probability = 0.0;
};

// Kraus decomposition of the channel; satisfies sum K^dag K = I.
std::vector<Eigen::Matrix2cd> kraus_operators(const NoiseChannel& channel);

// CPTP application. Throws std::invalid_argument when probability is
// outside [0, 1].
QubitState apply_channel(const QubitState& state, const NoiseChannel& channel);

// Noise configuration for a simulated device run. per_gate channels are
// applied, in order, after every rotation gate. readout_flip is a classical
// bit flip at measurement. final_depolarizing is applied once to the state
// right before measurement (the smoothing channel certificates refer to).
struct NoiseModel {
  std::vector<NoiseChannel> per_gate;
  double readout_flip = 0.0;
  double final_depolarizing = 0.0;

  bool empty() const {
    return per_gate.empty() && readout_flip == 0.0 && final_depolarizing == 0.0;
  }
  void validate() const;  // throws std::invalid_argument
};

// Invented calibration defaults standing in for an ion-trap-like device;
// every value is config-overridable.
NoiseModel device_like_noise();

QubitState apply_gate_noise(const QubitState& state, const NoiseModel& model);
QubitState apply_final_noise(const QubitState& state, const NoiseModel& model);

// Readout flip on a single projection probability: p -> p(1-r) + (1-p)r.
double flip_probability(double p, double readout_flip);

// Effective end-of-circuit depolarization rate of `gates` sequential
// applications of the model's depolarizing per-gate channels plus the final
// one. Exact for depolarizing-only models, since depolarizing commutes with
// single-qubit unitaries.
double effective_depolarization(const NoiseModel& model, int gates);

}  // namespace qaml
