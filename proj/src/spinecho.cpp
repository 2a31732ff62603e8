#include "iongate/spinecho.hpp"

#include <cmath>

#include "iongate/qdyn.hpp"
#include "iongate/spin.hpp"

namespace iongate {

std::vector<std::string> diagnostics(const SpinEchoConfig& cfg) {
  std::vector<std::string> d;
  if (!(cfg.rabi_mw > 0.0)) d.push_back("spin_echo.rabi_mw must be > 0");
  if (!std::isfinite(cfg.delta_f)) d.push_back("spin_echo.delta_f must be finite");
  if (!(cfg.gap_padding >= 0.0)) d.push_back("spin_echo.gap_padding must be >= 0");
  return d;
}

CMat mw_pulse(double angle, double phase, double detuning, double rabi) {
  return detuned_rotation(angle, phase, detuning, rabi);
}

CMat echo_pulse(const SpinEchoConfig& cfg, int k) {
  static const std::array<double, 3> angles{kPi / 2, kPi, kPi / 2};
  if (k < 0 || k > 2) throw Error("echo_pulse index must be 0, 1 or 2");
  const double det = kPi * cfg.delta_f;  // delta_f/2 in rad/s
  return kron(mw_pulse(angles[k], cfg.pulse_phases[k], det, cfg.rabi_mw),
              mw_pulse(angles[k], cfg.pulse_phases[k], -det, cfg.rabi_mw));
}

namespace {

CMat free_precession(double delta_f, double t) {
  // exp(-i (d/2) sz) on ion 1 and exp(+i (d/2) sz) on ion 2, d = pi delta_f.
  const double d = kPi * delta_f;
  CMat u = CMat::Zero(4, 4);
  const std::array<double, 2> z{-1.0, 1.0};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      u(2 * a + b, 2 * a + b) = std::exp(cplx(0.0, -0.5 * d * t * (z[a] - z[b])));
  return u;
}

}  // namespace

double epsilon_se(const SpinEchoConfig& cfg, double t_g) {
  throw_if_invalid(diagnostics(cfg));
  if (!(t_g >= 0.0)) throw Error("epsilon_se: t_g must be >= 0");
  const double gap = 0.5 * t_g + cfg.gap_padding;
  const CMat half_prec = free_precession(cfg.delta_f, 0.5 * gap);
  const CMat half_gate = ideal_phase_gate(kPi / 8);
  CVec psi = two_spin_ket(0, 0);
  psi = echo_pulse(cfg, 0) * psi;
  for (int g = 0; g < 2; ++g) {
    psi = half_prec * psi;
    psi = half_gate * psi;
    psi = half_prec * psi;
    psi = echo_pulse(cfg, g + 1) * psi;
  }
  const double f = std::norm(bell_psi_plus().dot(psi));
  return std::max(0.0, 1.0 - f);
}

std::vector<double> simulate_epsilon_se(const SpinEchoConfig& cfg, const std::vector<double>& t_g) {
  std::vector<double> out;
  out.reserve(t_g.size());
  for (double t : t_g) out.push_back(epsilon_se(cfg, t));
  return out;
}

SpinEchoPeak first_maximum(const SpinEchoConfig& cfg, double lo, double hi, int grid) {
  if (!(hi > lo) || grid < 3) throw Error("first_maximum: invalid search interval");
  const double step = (hi - lo) / grid;
  double prev2 = epsilon_se(cfg, lo), prev1 = epsilon_se(cfg, lo + step);
  int found = -1;
  for (int i = 2; i <= grid; ++i) {
    const double cur = epsilon_se(cfg, lo + i * step);
    if (prev1 >= prev2 && prev1 > cur) {
      found = i - 1;
      break;
    }
    prev2 = prev1;
    prev1 = cur;
  }
  if (found < 0) return {hi, epsilon_se(cfg, hi)};
  double a = lo + (found - 1) * step, b = lo + (found + 1) * step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = epsilon_se(cfg, c), fd = epsilon_se(cfg, d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = epsilon_se(cfg, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = epsilon_se(cfg, d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, epsilon_se(cfg, t)};
}

}  // namespace iongate
