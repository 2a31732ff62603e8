#include "iongate/gate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iongate/spin.hpp"

namespace iongate {

std::string to_string(ShapeKind kind) {
  return kind == ShapeKind::kRectangular ? "rectangular" : "smooth-ramp";
}

ShapeKind shape_kind_from_string(const std::string& s) {
  if (s == "rectangular") return ShapeKind::kRectangular;
  if (s == "smooth-ramp") return ShapeKind::kSmoothRamp;
  throw Error("unknown pulse shape '" + s + "' (expected rectangular or smooth-ramp)");
}

double PulseShape::ramp_duration() const {
  return kind == ShapeKind::kRectangular ? 0.0 : 0.5 * kPi * ramp_time;
}

double PulseShape::envelope(double tau, double length) const {
  if (tau < 0.0 || tau > length) return 0.0;
  if (kind == ShapeKind::kRectangular) return 1.0;
  const double rd = ramp_duration();
  const auto rise = [rd](double x) {
    if (x >= rd) return 1.0;
    const double s = std::sin(0.5 * kPi * x / rd);
    return s * s;
  };
  return std::min(rise(tau), rise(length - tau));
}

GateConfig GateConfig::for_gate_time(double t_g, int loops) {
  GateConfig cfg;
  cfg.loops = loops;
  cfg.delta_g = static_cast<double>(loops) / t_g;
  return cfg;
}

std::vector<std::string> diagnostics(const GateConfig& cfg) {
  std::vector<std::string> d;
  if (!(cfg.eta_gate > 0.0 && cfg.eta_gate < 1.0)) d.push_back("gate.eta_gate must be in (0,1)");
  if (!(cfg.eta_spec > 0.0 && cfg.eta_spec < 1.0)) d.push_back("gate.eta_spec must be in (0,1)");
  if (!(cfg.rabi >= 0.0)) d.push_back("gate.rabi must be >= 0");
  if (!(cfg.delta_g > 0.0)) d.push_back("gate.delta_g must be > 0");
  if (cfg.loops < 1) d.push_back("gate.loops must be >= 1");
  if (!(cfg.ramp_time >= 0.0)) d.push_back("gate.ramp_time must be >= 0");
  if (cfg.delta_g > 0.0 && cfg.loops >= 1) {
    const double tg = cfg.gate_time();
    if (!(cfg.ramp_time < tg / 2)) d.push_back("gate.ramp_time must be < t_g/2");
    // Both ramps of each of the two gate pulses must fit inside the pulse.
    if (cfg.shape == ShapeKind::kSmoothRamp && 2.0 * (0.5 * kPi * cfg.ramp_time) > tg / 2 + 1e-15)
      d.push_back("gate.ramp_time too long: two ramps of pi*ramp_time/2 exceed a pulse of t_g/2");
  }
  if (!(cfg.lightshift_amp >= 0.0)) d.push_back("gate.lightshift_amp must be >= 0");
  if (!(cfg.carrier_reduction >= 0.0 && cfg.carrier_reduction <= 1.0))
    d.push_back("gate.carrier_reduction must be in [0,1]");
  if (!(cfg.trap_freq > 0.0)) d.push_back("gate.trap_freq must be > 0");
  if (cfg.fock_cutoff < 0) d.push_back("gate.fock_cutoff must be >= 0");
  return d;
}

// ---------------------------------------------------------------- Hamiltonian

CMat nonlinear_sideband(int cutoff, double eta) {
  const int d = cutoff + 1;
  CMat a = CMat::Zero(d, d);
  const double x = eta * eta;
  for (int n = 0; n + 1 < d; ++n) {
    const double f = std::assoc_laguerre(static_cast<unsigned>(n), 1u, x) / (n + 1.0);
    a(n, n + 1) = std::sqrt(n + 1.0) * f;
  }
  return a;
}

namespace {

void require_gate_space(const OperatorSet& ops) {
  if (ops.spec().n_spins != 2 || ops.spec().n_modes() < 1)
    throw DimensionError("gate Hamiltonian needs two spins and a motional mode");
}

Operator mode_lowering(const GateConfig& cfg, const OperatorSet& ops) {
  if (!cfg.lamb_dicke_exact) return ops.annihilation(0);
  return ops.embed(nonlinear_sideband(ops.spec().fock_cutoff, cfg.eta_gate), ops.spec().n_spins);
}

}  // namespace

TimeDependentOperator force_hamiltonian(const GateConfig& cfg, const OperatorSet& ops,
                                        const PulseWindow& window) {
  require_gate_space(ops);
  const Operator s = ops.sigma_z(0) - ops.sigma_z(1);
  const Operator a = mode_lowering(cfg, ops);
  const Operator ad = a.adjoint();
  const double f = 0.5 * cfg.eta_gate * cfg.rabi;
  const double w = cfg.omega();
  const PulseShape shape = cfg.pulse_shape();
  const PulseWindow win = window;

  TimeDependentOperator h(ops.dimension());
  h.add_term(Operator(s * a), [=](double t) {
    return f * shape.envelope(t - win.start, win.duration) * std::exp(cplx(0.0, -w * t));
  });
  h.add_term(Operator(s * ad), [=](double t) {
    return f * shape.envelope(t - win.start, win.duration) * std::exp(cplx(0.0, w * t));
  });
  return h;
}

Operator force_hamiltonian_at(const GateConfig& cfg, const OperatorSet& ops,
                              const PulseWindow& window, double t) {
  return force_hamiltonian(cfg, ops, window).at(t);
}

// ---------------------------------------------------------------- Magnus phase

namespace {

// Unit-force integrals of one pulse starting at clock time `start`:
// j = int env e^{iwt} dt, phase = int dt1 env1 int^{t1} dt2 env2 sin(w(t1-t2)),
// max_path = max_t |offset + sign * int_start^t env e^{iwt'} dt'|.
struct PulseIntegrals {
  cplx j = 0.0;
  double phase = 0.0;
  double max_path = 0.0;
};

PulseIntegrals pulse_integrals(const GateConfig& cfg, double start, double length,
                               cplx offset = 0.0, double sign = 1.0) {
  PulseIntegrals out;
  out.max_path = std::abs(offset);
  if (length <= 0.0) return out;
  const double w = cfg.omega();
  if (cfg.shape == ShapeKind::kRectangular) {
    out.j = (std::exp(cplx(0.0, w * (start + length))) - std::exp(cplx(0.0, w * start))) /
            cplx(0.0, w);
    out.phase = length / w - std::sin(w * length) / (w * w);
    // |e^{iwt} - e^{iw start}| / w is maximal at half a loop or at the end.
    const double reach = (w * length >= kPi) ? 2.0 / w : std::abs(out.j);
    out.max_path = std::abs(offset) + reach;
    return out;
  }
  const PulseShape shape = cfg.pulse_shape();
  const auto n = 2 * static_cast<std::size_t>(std::max(2000.0, 2000.0 * length * cfg.delta_g));
  const double h = length / static_cast<double>(n);
  cplx big = 0.0;
  cplx prev = shape.envelope(0.0, length) * std::exp(cplx(0.0, w * start));
  double prev_outer = 0.0, acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double tau = h * static_cast<double>(k);
    const double env = shape.envelope(tau, length);
    const cplx e = std::exp(cplx(0.0, w * (start + tau)));
    const cplx cur = env * e;
    big += 0.5 * h * (prev + cur);
    const double outer = env * std::imag(e * std::conj(big));
    acc += 0.5 * h * (prev_outer + outer);
    out.max_path = std::max(out.max_path, std::abs(offset + sign * big));
    prev = cur;
    prev_outer = outer;
  }
  out.j = big;
  out.phase = acc;
  return out;
}

// Two echoed pulses of length t_R/2 each; the echo reverses the force sign of
// the second pulse in the toggling frame.
struct SequenceIntegrals {
  double phase_unit = 0.0;
  double max_path_unit = 0.0;
};

SequenceIntegrals sequence_integrals(const GateConfig& cfg, double raman_time) {
  SequenceIntegrals out;
  if (raman_time <= 0.0) return out;
  const double half = 0.5 * raman_time;
  const PulseIntegrals p1 = pulse_integrals(cfg, 0.0, half);
  const PulseIntegrals p2 = pulse_integrals(cfg, half, half, p1.j, -1.0);
  out.phase_unit = p1.phase + p2.phase - std::imag(p2.j * std::conj(p1.j));
  out.max_path_unit = std::max(p1.max_path, p2.max_path);
  return out;
}

}  // namespace

double geometric_phase(const GateConfig& cfg, double rabi, double raman_time) {
  const double f = 0.5 * cfg.eta_gate * rabi;
  // S^2 = 4 for anti-aligned spins, 0 for aligned.
  return 4.0 * f * f * sequence_integrals(cfg, raman_time).phase_unit;
}

double analytic_rabi(const GateConfig& cfg) {
  throw_if_invalid(diagnostics(cfg));
  const double unit = sequence_integrals(cfg, cfg.gate_time()).phase_unit;
  if (!(unit > 0.0)) throw CalibrationError("analytic Rabi estimate: non-positive phase integral");
  const double f = std::sqrt((kPi / 8.0) / unit);
  return 2.0 * f / cfg.eta_gate;
}

double max_displacement(const GateConfig& cfg, double rabi, double raman_time) {
  const double f = 0.5 * cfg.eta_gate * rabi;
  return 2.0 * f * sequence_integrals(cfg, raman_time).max_path_unit;
}

// ---------------------------------------------------------------- sequence

std::vector<LindbladChannel> noise_channels(const NoiseParams& noise, const OperatorSet& ops) {
  std::vector<LindbladChannel> ch;
  const bool has_mode = ops.spec().n_modes() > 0;
  if (noise.heating_rate > 0.0) {
    if (!has_mode) throw DimensionError("heating channel requires a motional mode");
    const double r = std::sqrt(noise.heating_rate);
    ch.push_back({Operator(r * ops.annihilation(0)), "heating-down"});
    ch.push_back({Operator(r * ops.creation(0)), "heating-up"});
  }
  if (std::isfinite(noise.motional_tau)) {
    if (!has_mode) throw DimensionError("motional dephasing requires a motional mode");
    ch.push_back({Operator(std::sqrt(2.0 / noise.motional_tau) * ops.number(0)),
                  "motional-dephasing"});
  }
  for (int j = 0; j < ops.spec().n_spins; ++j) {
    if (noise.raman_rate > 0.0) {
      const double r = std::sqrt(noise.raman_rate);
      ch.push_back({Operator(r * ops.sigma_plus(j)), "raman-up-" + std::to_string(j)});
      ch.push_back({Operator(r * ops.sigma_minus(j)), "raman-down-" + std::to_string(j)});
    }
  }
  if (noise.rayleigh_deph_rate > 0.0) {
    const double r = std::sqrt(0.5 * noise.rayleigh_deph_rate);
    if (noise.correlated_dephasing) {
      Operator sum = ops.sigma_z(0);
      for (int j = 1; j < ops.spec().n_spins; ++j) sum += ops.sigma_z(j);
      ch.push_back({Operator(r * sum), "rayleigh-common"});
    } else {
      for (int j = 0; j < ops.spec().n_spins; ++j)
        ch.push_back({Operator(r * ops.sigma_z(j)), "rayleigh-" + std::to_string(j)});
    }
  }
  return ch;
}

namespace {

void apply_unitary(CMat& rho, const Operator& u) {
  const CMat ur = u * rho;
  rho = ur * CMat(u.adjoint());
}

struct EchoUnitaries {
  std::array<CMat, 3> pulses;  // 4x4
  double precession = 0.0;     // per-ion detuning magnitude, rad/s
};

EchoUnitaries echo_unitaries(const std::optional<SpinEchoConfig>& echo) {
  EchoUnitaries e;
  const std::array<double, 3> angles{kPi / 2, kPi, kPi / 2};
  if (!echo) {
    for (int k = 0; k < 3; ++k) e.pulses[k] = kron(rotation(angles[k], kPi / 4), rotation(angles[k], kPi / 4));
    return e;
  }
  for (int k = 0; k < 3; ++k) e.pulses[k] = echo_pulse(*echo, k);
  e.precession = kPi * echo->delta_f;
  return e;
}

int choose_cutoff(const GateConfig& cfg, double nbar, double rabi, double raman_time) {
  if (cfg.fock_cutoff > 0) return cfg.fock_cutoff;
  const double a = max_displacement(cfg, rabi, raman_time);
  return recommended_cutoff(nbar, a * a);
}

}  // namespace

GateOutcome run_bell_sequence(const GateConfig& cfg, const NoiseParams& noise,
                              const std::optional<SpinEchoConfig>& echo,
                              const SequenceOptions& options) {
  throw_if_invalid(diagnostics(cfg));
  throw_if_invalid(diagnostics(noise));
  if (!(cfg.rabi > 0.0)) throw CalibrationError("run_bell_sequence: gate Rabi frequency not calibrated");
  if (echo) throw_if_invalid(diagnostics(*echo));

  GateConfig run = cfg;
  run.rabi = cfg.rabi * (1.0 + noise.intensity_drift_frac);
  const double t_r = options.raman_time < 0.0 ? cfg.gate_time() : options.raman_time;
  const double half = 0.5 * t_r;

  const int cutoff = choose_cutoff(run, noise.nbar_gate, run.rabi, t_r);
  const HilbertSpec spec{2, cutoff, {"com"}};
  const OperatorSet ops = build_operators(spec);
  const auto channels = noise_channels(noise, ops);
  const EchoUnitaries eu = echo_unitaries(echo);
  std::array<Operator, 3> pulses;
  for (int k = 0; k < 3; ++k) pulses[k] = ops.embed_spins(eu.pulses[k]);

  QuantumState state = product_state(spec, two_spin_ket(0, 0), {thermal_mode(cutoff, noise.nbar_gate)});
  apply_unitary(state.rho, pulses[0]);
  for (int p = 0; p < 2; ++p) {
    if (half > 0.0) {
      const PulseWindow win{p * half, half};
      TimeDependentOperator h = force_hamiltonian(run, ops, win);
      if (eu.precession != 0.0)
        h.add_constant(Operator(0.5 * eu.precession * (ops.sigma_z(0) - ops.sigma_z(1))));
      state.time = win.start;
      state = evolve_final(state, h, channels, half, options.evolve);
    }
    apply_unitary(state.rho, pulses[p + 1]);
  }

  GateOutcome out;
  out.final_spin_state = partial_trace(state, {0, 1});
  out.final_spin_state.rho = 0.5 * (out.final_spin_state.rho + out.final_spin_state.rho.adjoint());
  out.populations = class_populations(out.final_spin_state.rho);
  out.bell_fidelity = fidelity_with_pure(out.final_spin_state, bell_psi_plus());
  out.geometric_phase_differential = geometric_phase(run, run.rabi, t_r);
  return out;
}

// ---------------------------------------------------------------- calibration

namespace {

double imbalance(const GateConfig& cfg, double rabi) {
  GateConfig c = cfg;
  c.rabi = rabi;
  const GateOutcome o = run_bell_sequence(c, NoiseParams{});
  return o.populations[0] - o.populations[2];
}

double infidelity(const GateConfig& cfg, double rabi) {
  GateConfig c = cfg;
  c.rabi = rabi;
  return 1.0 - run_bell_sequence(c, NoiseParams{}).bell_fidelity;
}

}  // namespace

double calibrate_rabi(const GateConfig& cfg, const CalibrationOptions& options) {
  throw_if_invalid(diagnostics(cfg));
  const double seed = analytic_rabi(cfg);
  const double target_err = 1.0 - options.fidelity_target;

  // Secant search on the signed population imbalance P_dd - P_uu.
  double x0 = seed, x1 = seed * (1.0 + 1e-3);
  double f0 = imbalance(cfg, x0), f1 = imbalance(cfg, x1);
  double best = std::abs(f0) < std::abs(f1) ? x0 : x1;
  for (int it = 0; it < options.max_iterations && f1 != f0; ++it) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 > 0.0) || std::abs(x2 / seed - 1.0) > 0.5) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = imbalance(cfg, x1);
    best = x1;
    if (std::abs(x1 - x0) < 1e-13 * x1 || std::abs(f1) < 1e-13) break;
  }
  if (infidelity(cfg, best) <= target_err) return best;

  // Fall back to golden-section minimisation of the infidelity near the seed.
  double lo = 0.95 * best, hi = 1.05 * best;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = infidelity(cfg, c), fd = infidelity(cfg, d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * best; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = infidelity(cfg, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = infidelity(cfg, d);
    }
  }
  const double x = 0.5 * (lo + hi);
  const double err = infidelity(cfg, x);
  if (err <= target_err) return x;
  std::ostringstream os;
  os << "Rabi calibration did not reach the fidelity target: bracket [" << lo << ", " << hi
     << "] rad/s, seed " << seed << ", best infidelity " << err;
  throw CalibrationError(os.str());
}

GateConfig calibrated(GateConfig cfg, const CalibrationOptions& options) {
  cfg.rabi = calibrate_rabi(cfg, options);
  return cfg;
}

// ---------------------------------------------------------------- dynamics

std::vector<PopulationPoint> population_dynamics(const GateConfig& cfg,
                                                 const std::vector<double>& raman_times,
                                                 const EvolveOptions& evolve) {
  std::vector<PopulationPoint> out;
  out.reserve(raman_times.size());
  for (double tr : raman_times) {
    SequenceOptions so;
    so.raman_time = tr;
    so.evolve = evolve;
    const GateOutcome o = run_bell_sequence(cfg, NoiseParams{}, std::nullopt, so);
    out.push_back({tr, o.populations[0], o.populations[1], o.populations[2]});
  }
  return out;
}

namespace {

struct Branch {
  cplx amp;
  int spin;   // two-spin basis index
  cplx alpha;  // coherent amplitude
};

// Per-pulse displacement (per unit S) and Magnus phase (per unit S^2).
std::pair<cplx, double> pulse_terms(const GateConfig& cfg, double start, double length) {
  const double f = 0.5 * cfg.eta_gate * cfg.rabi;
  const PulseIntegrals p = pulse_integrals(cfg, start, length);
  return {cplx(0.0, -f) * p.j, f * f * p.phase};
}

void apply_gate_pulse(std::vector<Branch>& br, const cplx& beta, double phi) {
  static const std::array<double, 4> s{0.0, -2.0, 2.0, 0.0};
  for (auto& b : br) {
    const cplx x = s[b.spin] * beta;
    b.amp *= std::exp(cplx(0.0, s[b.spin] * s[b.spin] * phi + std::imag(x * std::conj(b.alpha))));
    b.alpha += x;
  }
}

std::vector<Branch> apply_spin_unitary(const std::vector<Branch>& br, const CMat& u) {
  std::vector<Branch> out;
  for (const auto& b : br)
    for (int k = 0; k < 4; ++k)
      if (std::abs(u(k, b.spin)) > 0.0) out.push_back({u(k, b.spin) * b.amp, k, b.alpha});
  return out;
}

}  // namespace

std::vector<PopulationPoint> population_dynamics_analytic(const GateConfig& cfg,
                                                          const std::vector<double>& raman_times) {
  throw_if_invalid(diagnostics(cfg));
  const EchoUnitaries eu = echo_unitaries(std::nullopt);
  std::vector<PopulationPoint> out;
  for (double tr : raman_times) {
    const double half = 0.5 * tr;
    std::vector<Branch> br{{1.0, 0, 0.0}};
    br = apply_spin_unitary(br, eu.pulses[0]);
    for (int p = 0; p < 2; ++p) {
      if (half > 0.0) {
        const auto [beta, phi] = pulse_terms(cfg, p * half, half);
        apply_gate_pulse(br, beta, phi);
      }
      br = apply_spin_unitary(br, eu.pulses[p + 1]);
    }
    std::array<double, 4> pop{};
    for (const auto& a : br)
      for (const auto& b : br) {
        if (a.spin != b.spin) continue;
        const cplx overlap = std::exp(-0.5 * std::norm(b.alpha) - 0.5 * std::norm(a.alpha) +
                                      std::conj(b.alpha) * a.alpha);
        pop[a.spin] += std::real(a.amp * std::conj(b.amp) * overlap);
      }
    out.push_back({tr, pop[0], pop[1] + pop[2], pop[3]});
  }
  return out;
}

// ---------------------------------------------------------------- light shift

namespace {

double bell_error_from_rho(const CMat& rho) {
  const CVec psi = bell_psi_plus();
  return 1.0 - (psi.adjoint() * rho * psi)(0, 0).real();
}

}  // namespace

LightShiftResult carrier_lightshift_error(const GateConfig& cfg, const PulseShape& shape,
                                          int n_phases, const EvolveOptions& evolve_opts) {
  throw_if_invalid(diagnostics(cfg));
  if (n_phases < 1) throw Error("carrier_lightshift_error: n_phases must be >= 1");
  LightShiftResult res;
  const double half = 0.5 * cfg.gate_time();
  const double amp = 0.5 * cfg.carrier_reduction * cfg.lightshift_amp;
  const double wd = kTwoPi * cfg.raman_difference_frequency();
  const HilbertSpec spec{2, 0, {}};
  const OperatorSet ops = build_operators(spec);
  const Operator zsum = ops.sigma_z(0) + ops.sigma_z(1);
  const EchoUnitaries eu = echo_unitaries(std::nullopt);
  const CMat half_gate = ideal_phase_gate(kPi / 8);
  for (int k = 0; k < n_phases; ++k) {
    const double phi = cfg.optical_phase + kTwoPi * k / n_phases;
    QuantumState st = pure_state(spec, two_spin_ket(0, 0));
    st.rho = eu.pulses[0] * st.rho * eu.pulses[0].adjoint();
    for (int p = 0; p < 2; ++p) {
      st.rho = half_gate * st.rho * half_gate.adjoint();
      if (amp != 0.0) {
        const double start = p * half;
        TimeDependentOperator h(ops.dimension());
        h.add_term(zsum, [=](double t) {
          return cplx(amp * shape.envelope(t - start, half) * std::cos(wd * t + phi), 0.0);
        });
        st.time = start;
        EvolveOptions eo = evolve_opts;
        eo.integrator.max_step = std::min(eo.integrator.max_step, 0.05 * kTwoPi / wd);
        st = evolve_final(st, h, {}, half, eo);
      }
      st.rho = eu.pulses[p + 1] * st.rho * eu.pulses[p + 1].adjoint();
    }
    const double e = std::max(0.0, bell_error_from_rho(st.rho));
    res.per_phase.push_back(e);
  }
  for (double e : res.per_phase) {
    res.worst = std::max(res.worst, e);
    res.average += e / n_phases;
  }
  return res;
}

LightShiftResult carrier_lightshift_error_quadrature(const GateConfig& cfg, const PulseShape& shape,
                                                     int n_phases) {
  throw_if_invalid(diagnostics(cfg));
  if (n_phases < 1) throw Error("carrier_lightshift_error: n_phases must be >= 1");
  const double half = 0.5 * cfg.gate_time();
  const double amp = 0.5 * cfg.carrier_reduction * cfg.lightshift_amp;
  const double wd = kTwoPi * cfg.raman_difference_frequency();
  // c_p = int env e^{i wd t} over pulse p; Theta_p(phi) = amp Re(e^{i phi} c_p).
  std::array<cplx, 2> c{};
  const auto n = static_cast<std::size_t>(std::max(2000.0, 64.0 * half * wd / kTwoPi)) * 2;
  const double h = half / static_cast<double>(n);
  for (int p = 0; p < 2; ++p) {
    const double start = p * half;
    cplx acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double tau = h * static_cast<double>(k);
      const double wgt = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc += wgt * shape.envelope(tau, half) * std::exp(cplx(0.0, wd * (start + tau)));
    }
    c[p] = acc * (h / 3.0);
  }
  const EchoUnitaries eu = echo_unitaries(std::nullopt);
  const CVec psi = bell_psi_plus();
  const CMat zsum = kron(pauli_z(), CMat::Identity(2, 2)) + kron(CMat::Identity(2, 2), pauli_z());
  LightShiftResult res;
  for (int k = 0; k < n_phases; ++k) {
    const double phi = cfg.optical_phase + kTwoPi * k / n_phases;
    const double th1 = amp * std::real(std::exp(cplx(0.0, phi)) * c[0]);
    const double th2 = amp * std::real(std::exp(cplx(0.0, phi)) * c[1]);
    // The echo pi pulse reverses the first pulse's phase.
    const double dth = th2 - th1;
    CMat l = CMat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) l(i, i) = std::exp(cplx(0.0, -dth * zsum(i, i).real()));
    const CMat u = eu.pulses[2] * l * eu.pulses[2].adjoint();
    const double e = 1.0 - std::norm((psi.adjoint() * u * psi)(0, 0));
    res.per_phase.push_back(std::max(0.0, e));
  }
  for (double e : res.per_phase) {
    res.worst = std::max(res.worst, e);
    res.average += e / n_phases;
  }
  return res;
}

double calibrate_lightshift(const GateConfig& cfg, double target, int n_phases) {
  if (!(target > 0.0 && target < 0.5)) throw CalibrationError("light-shift target must be in (0, 0.5)");
  GateConfig c = cfg;
  const PulseShape rect{ShapeKind::kRectangular, 0.0};
  const auto avg = [&](double amp) {
    c.lightshift_amp = amp;
    return carrier_lightshift_error_quadrature(c, rect, n_phases).average;
  };
  // Error is quadratic in the amplitude at small amplitude; refine by secant.
  const double probe = 1e5;
  const double e_probe = avg(probe);
  if (!(e_probe > 0.0))
    throw CalibrationError("light-shift calibration: no error at this gate time (phases are exact multiples of 2 pi)");
  double x0 = probe * std::sqrt(target / e_probe);
  double x1 = x0 * 1.01;
  double f0 = avg(x0) - target, f1 = avg(x1) - target;
  for (int it = 0; it < 50 && std::abs(f1) > 1e-14 && f1 != f0; ++it) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = avg(x1) - target;
  }
  if (!(std::abs(f1) < 1e-9)) throw CalibrationError("light-shift calibration did not converge");
  return x1;
}

}  // namespace iongate
