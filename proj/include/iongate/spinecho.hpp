#pragma once

#include <array>
#include <string>
#include <vector>

#include "iongate/core.hpp"

namespace iongate {

// pi/2 - gap - pi - gap - pi/2 with finite microwave pulses; each gap lasts
// t_g/2 + gap_padding and carries half of an ideal ZZ phase gate at its midpoint.
struct SpinEchoConfig {
  double rabi_mw = kTwoPi * 82e3;  // rad/s
  double delta_f = 4.91e3;         // qubit frequency difference, Hz (split +-delta_f/2)
  std::array<double, 3> pulse_phases{kPi / 4, kPi / 4, kPi / 4};
  double gap_padding = 0.0;  // s, added to each gap
};

std::vector<std::string> diagnostics(const SpinEchoConfig& cfg);

// Exact detuned two-level rotation (generalised Rabi).  detuning and rabi in rad/s.
CMat mw_pulse(double angle, double phase, double detuning, double rabi);

// Two-ion unitary of echo pulse k (0: pi/2, 1: pi, 2: pi/2) with the ions
// detuned by +-delta_f/2.
CMat echo_pulse(const SpinEchoConfig& cfg, int k);

// Bell-state error of the echo sequence with an ideal phase gate.
double epsilon_se(const SpinEchoConfig& cfg, double t_g);
std::vector<double> simulate_epsilon_se(const SpinEchoConfig& cfg, const std::vector<double>& t_g);

struct SpinEchoPeak {
  double t_g = 0.0;
  double error = 0.0;
};

// First local maximum of epsilon_se on (lo, hi], located by a grid scan and
// golden-section refinement.
SpinEchoPeak first_maximum(const SpinEchoConfig& cfg, double lo, double hi, int grid = 400);

}  // namespace iongate
