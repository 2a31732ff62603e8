#pragma once

#include <limits>
#include <string>
#include <vector>

namespace iongate {

struct NoiseParams {
  double nbar_gate = 0.0;             // gate (COM) mode occupation
  double nbar_spec = 0.0;             // spectator (stretch) mode occupation
  double heating_rate = 0.0;          // quanta/s
  double motional_tau = std::numeric_limits<double>::infinity();  // s
  double spin_dephasing_coeff = 0.0;  // beta, 1/s^2 in C(t) = 1 - beta t^2
  double raman_rate = 0.0;            // spin-flip scattering events/s per ion
  double rayleigh_deph_rate = 0.0;    // elastic dephasing, 1/s per ion
  double intensity_drift_frac = 0.0;  // dOmega/Omega
  bool correlated_dephasing = false;  // Rayleigh dephasing common to both ions
};

std::vector<std::string> diagnostics(const NoiseParams& noise);

}  // namespace iongate
