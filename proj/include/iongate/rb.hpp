#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iongate/io.hpp"

namespace iongate {

struct RbPlan {
  std::vector<int> sequence_lengths{1, 100, 300, 600, 1000};  // computational gates
  int n_sequences = 32;
  std::int64_t shots = 300;
  // Allow the pi/2 part of a computational gate to be an identity (1 in 5).
  bool include_identity = false;
  double phase_offset = 0.0;  // rad added to every pulse phase
  std::uint64_t seed = 1;
};

std::vector<std::string> diagnostics(const RbPlan& plan);

enum class PhaseNoiseKind { kNone, kOrnsteinUhlenbeck };

struct NoiseModel1Q {
  double depolarizing_per_gate = 0.0;  // error per computational gate (Bloch shrink 1 - 2 eps)
  PhaseNoiseKind phase_noise = PhaseNoiseKind::kNone;
  double phase_noise_amplitude = 0.0;  // rad, stationary rms
  double phase_noise_correlation = 1e-3;  // s
  double detuning_error = 0.0;  // Hz
  double amplitude_error_frac = 0.0;
  double pulse_time = 2e-6;  // s per pi/2 pulse
};

std::vector<std::string> diagnostics(const NoiseModel1Q& noise);

// Pauli I, X, Y, Z then a pi/2 pulse about +x, +y, -x, -y (axis = -1: none).
struct RbGate {
  int pauli = 0;
  int axis = 0;
};

struct RbSequence {
  int length = 0;
  int sequence_id = 0;
  std::vector<RbGate> gates;
  int recovery_axis = -1;  // pi/2 pulse axis, -1 when already on a pole
  bool expect_up = false;  // noise-free outcome
};

// Physical pi/2 pulses in a computational gate (X, Y Paulis are two pulses,
// Z is a frame change).
int physical_pulses(const RbGate& g);

std::vector<RbSequence> generate_sequences(const RbPlan& plan);

// Probability of the expected outcome for one noise realisation (or the exact
// ensemble when the noise has no stochastic part).
double sequence_survival(const RbSequence& seq, const NoiseModel1Q& noise, double phase_offset,
                         std::uint64_t noise_seed);

struct RbRecord {
  int length = 0;
  int sequence_id = 0;
  std::int64_t successes = 0;
  std::int64_t shots = 0;
};

std::vector<RbRecord> simulate_rb(const RbPlan& plan, const NoiseModel1Q& noise, unsigned jobs = 1);

struct RbResult {
  std::vector<int> lengths;
  std::vector<double> survival;     // mean over sequences
  std::vector<double> survival_se;  // binomial
  double a = 0.0;
  double p = 0.0;
  double b = 0.5;
  double se_p = 0.0;
  double error_per_gate = 0.0;  // (1 - p)/2
  double se_error_per_gate = 0.0;
  double reduced_chi2 = 0.0;
  bool b_fixed = true;
};

// Weighted fit of P(l) = A p^l + B; B is fixed at `fixed_b` unless it is NaN.
RbResult fit_decay(const std::vector<RbRecord>& data, double fixed_b = 0.5);

Table to_table(const std::vector<RbRecord>& data);
std::vector<RbRecord> rb_records_from_csv(const std::string& text);
Json to_json(const RbResult& r);

}  // namespace iongate
