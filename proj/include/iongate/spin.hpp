#pragma once

#include <array>

#include "iongate/core.hpp"

namespace iongate {

// Single-spin basis: index 0 = down, 1 = up.  sigma_z = diag(-1, +1).
CMat pauli_x();
CMat pauli_y();
CMat pauli_z();
CMat sigma_plus_local();   // |up><down|
CMat sigma_minus_local();  // |down><up|

// exp(-i angle/2 (cos(phase) X + sin(phase) Y)).
CMat rotation(double angle, double phase);
// Rotation by a drive of Rabi frequency `rabi` (rad/s) lasting angle/rabi
// seconds, detuned by `detuning` (rad/s) in the frame of the drive.
CMat detuned_rotation(double angle, double phase, double detuning, double rabi);

// Two-spin basis order: dd, du, ud, uu.
CVec two_spin_ket(int spin1_up, int spin2_up);
CVec bell_psi_plus();  // (|dd> + |uu>)/sqrt(2)
CMat two_spin_zz();
CMat ideal_phase_gate(double phase = kPi / 4);  // exp(-i phase Z1 Z2)

// Populations {P_dd, P_flip, P_uu} from a 4x4 density matrix.
std::array<double, 3> class_populations(const CMat& rho4);

}  // namespace iongate
