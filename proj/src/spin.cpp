#include "iongate/spin.hpp"

#include <cmath>

#include "iongate/qdyn.hpp"

namespace iongate {

CMat pauli_x() {
  CMat m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMat pauli_y() {
  CMat m(2, 2);
  m << cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(0.0, 0.0);
  return m;
}

CMat pauli_z() {
  CMat m(2, 2);
  m << -1.0, 0.0, 0.0, 1.0;
  return m;
}

CMat sigma_plus_local() {
  CMat m = CMat::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

CMat sigma_minus_local() {
  CMat m = CMat::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

CMat rotation(double angle, double phase) {
  return detuned_rotation(angle, phase, 0.0, 1.0);
}

CMat detuned_rotation(double angle, double phase, double detuning, double rabi) {
  // H = (rabi/2)(cos X + sin Y) + (detuning/2) Z for a time angle/rabi.
  if (!(rabi > 0.0)) throw Error("rotation requires rabi > 0");
  const double t = angle / rabi;
  const double w = std::hypot(rabi, detuning);
  const double c = std::cos(0.5 * w * t);
  const double s = std::sin(0.5 * w * t);
  const CMat n = (rabi * (std::cos(phase) * pauli_x() + std::sin(phase) * pauli_y()) +
                  detuning * pauli_z()) /
                 w;
  return c * CMat::Identity(2, 2) - kI * s * n;
}

CVec two_spin_ket(int spin1_up, int spin2_up) {
  CVec v = CVec::Zero(4);
  v(2 * (spin1_up ? 1 : 0) + (spin2_up ? 1 : 0)) = 1.0;
  return v;
}

CVec bell_psi_plus() {
  return (two_spin_ket(0, 0) + two_spin_ket(1, 1)) / std::sqrt(2.0);
}

CMat two_spin_zz() { return kron(pauli_z(), pauli_z()); }

CMat ideal_phase_gate(double phase) {
  CMat u = CMat::Zero(4, 4);
  const CMat zz = two_spin_zz();
  for (int i = 0; i < 4; ++i) u(i, i) = std::exp(cplx(0.0, -phase * zz(i, i).real()));
  return u;
}

std::array<double, 3> class_populations(const CMat& rho4) {
  if (rho4.rows() != 4) throw DimensionError("two-spin density matrix required");
  return {rho4(0, 0).real(), rho4(1, 1).real() + rho4(2, 2).real(), rho4(3, 3).real()};
}

}  // namespace iongate
