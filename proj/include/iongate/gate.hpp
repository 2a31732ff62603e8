#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "iongate/noise.hpp"
#include "iongate/qdyn.hpp"
#include "iongate/spinecho.hpp"

namespace iongate {

enum class ShapeKind { kRectangular, kSmoothRamp };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& s);

// Pulse envelope; the smooth ramp is sin^2 over pi*ramp_time/2 at both ends.
struct PulseShape {
  ShapeKind kind = ShapeKind::kSmoothRamp;
  double ramp_time = 1.5e-6;

  double ramp_duration() const;
  // Envelope `tau` seconds into a pulse of total length `length`.
  double envelope(double tau, double length) const;
};

struct GateConfig {
  double eta_gate = 0.123;
  double eta_spec = 0.094;
  double rabi = 0.0;          // sideband-force drive strength, rad/s (0 = uncalibrated)
  double delta_g = 2.0e4;     // gate detuning, Hz
  int loops = 2;              // K
  ShapeKind shape = ShapeKind::kSmoothRamp;
  double ramp_time = 1.5e-6;  // s
  double lightshift_amp = 0.0;      // Omega_ls, rad/s
  double optical_phase = 0.0;       // rad
  double carrier_reduction = 0.83;  // micromotion reduction of the carrier coupling
  double trap_freq = 1.95e6;        // axial COM frequency f_z, Hz
  double raman_detuning_meta = -3.0e12;  // Hz, metadata only
  // Replace a by the full Debye-Waller-corrected sideband operator.
  bool lamb_dicke_exact = false;
  int fock_cutoff = 0;  // 0 = automatic

  double gate_time() const { return static_cast<double>(loops) / delta_g; }
  double omega() const { return kTwoPi * delta_g; }  // rad/s
  PulseShape pulse_shape() const { return PulseShape{shape, ramp_time}; }
  // Clock frequency of the carrier light shift, delta = f_z + delta_g (Hz).
  double raman_difference_frequency() const { return trap_freq + delta_g; }

  static GateConfig for_gate_time(double t_g, int loops = 2);
};

std::vector<std::string> diagnostics(const GateConfig& cfg);

// A gate pulse occupying clock times [start, start + duration).
struct PulseWindow {
  double start = 0.0;
  double duration = 0.0;
};

// env(t) (eta Omega / 2) (sz1 - sz2) (A e^{-i w t} + A^dag e^{i w t}) on the
// COM mode, A = a (or the nonlinear sideband operator).
TimeDependentOperator force_hamiltonian(const GateConfig& cfg, const OperatorSet& ops,
                                        const PulseWindow& window);
Operator force_hamiltonian_at(const GateConfig& cfg, const OperatorSet& ops,
                              const PulseWindow& window, double t);

// Sideband operator with matrix elements <n|A|n+1> = sqrt(n+1) f(n),
// f(n) = e^{-eta^2/2} L_n^1(eta^2) / (n+1) normalised so f(0) = 1.
CMat nonlinear_sideband(int cutoff, double eta);

// Magnus differential phase (anti-aligned minus aligned) accumulated by the
// two echoed gate pulses of total Raman time t_R; pi/2 for the ideal gate.
double geometric_phase(const GateConfig& cfg, double rabi, double raman_time);
// Rabi frequency making geometric_phase(t_g) = pi/2.
double analytic_rabi(const GateConfig& cfg);
// Largest spin-motion displacement |alpha| reached during the sequence.
double max_displacement(const GateConfig& cfg, double rabi, double raman_time);

struct GateOutcome {
  QuantumState final_spin_state;
  std::array<double, 3> populations{};  // P_dd, P_flip, P_uu
  double bell_fidelity = 0.0;
  double geometric_phase_differential = 0.0;
};

struct SequenceOptions {
  double raman_time = -1.0;  // total gate-pulse time t_R; negative = t_g
  EvolveOptions evolve;
};

// pi/2 - gate pulse - pi - gate pulse - pi/2 on |dd> (x) thermal(nbar_gate).
// Echo pulses are ideal unless `echo` is given, in which case they are finite
// detuned microwave pulses and the qubits precess at +-delta_f/2.
GateOutcome run_bell_sequence(const GateConfig& cfg, const NoiseParams& noise,
                              const std::optional<SpinEchoConfig>& echo = std::nullopt,
                              const SequenceOptions& options = {});

// Lindblad channels implied by the noise parameters.
std::vector<LindbladChannel> noise_channels(const NoiseParams& noise, const OperatorSet& ops);

struct CalibrationOptions {
  double fidelity_target = 1.0 - 1e-9;
  int max_iterations = 60;
};

// Smallest Omega giving a noise-free Bell fidelity >= target.
double calibrate_rabi(const GateConfig& cfg, const CalibrationOptions& options = {});
GateConfig calibrated(GateConfig cfg, const CalibrationOptions& options = {});

struct PopulationPoint {
  double raman_time = 0.0;
  double p_dd = 0.0;
  double p_flip = 0.0;
  double p_uu = 0.0;
};

std::vector<PopulationPoint> population_dynamics(const GateConfig& cfg,
                                                 const std::vector<double>& raman_times,
                                                 const EvolveOptions& evolve = {});
// Closed-form coherent-state solution (n = 0, noise-free, any shape).
std::vector<PopulationPoint> population_dynamics_analytic(const GateConfig& cfg,
                                                          const std::vector<double>& raman_times);

struct LightShiftResult {
  double worst = 0.0;
  double average = 0.0;
  std::vector<double> per_phase;
};

// Bell error from the carrier light shift alone, swept over `n_phases`
// uniformly spaced optical phases.  Uses a 4x4 master-equation run.
LightShiftResult carrier_lightshift_error(const GateConfig& cfg, const PulseShape& shape,
                                          int n_phases = 16, const EvolveOptions& evolve = {});
// Same quantity from the exact accumulated phase (the light shift commutes
// with the gate), evaluated by quadrature.
LightShiftResult carrier_lightshift_error_quadrature(const GateConfig& cfg, const PulseShape& shape,
                                                     int n_phases = 16);
// Omega_ls giving `target` phase-averaged error with rectangular pulses.
double calibrate_lightshift(const GateConfig& cfg, double target = 4e-3, int n_phases = 16);

}  // namespace iongate
