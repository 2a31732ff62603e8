#include "iongate/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "iongate/budget.hpp"
#include "iongate/config.hpp"
#include "iongate/gate.hpp"
#include "iongate/qdyn.hpp"
#include "iongate/rb.hpp"
#include "iongate/readout.hpp"
#include "iongate/spin.hpp"
#include "iongate/spinecho.hpp"
#include "iongate/tomography.hpp"

namespace iongate {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

using CheckFn = std::function<Outcome(std::uint64_t seed)>;

// ------------------------------------------------------------------ qdyn

struct DrivenMode {
  OperatorSet ops;
  TimeDependentOperator h;
  QuantumState initial;
  double duration;
};

// One spin pushed by a state-dependent force at frequency w, the gate's
// structure on a small register.
DrivenMode driven_mode(double drive_over_w, int cutoff) {
  const HilbertSpec spec{1, cutoff, {"mode"}};
  OperatorSet ops(spec);
  const double w = kTwoPi * 20e3;
  const double g = drive_over_w * w;
  TimeDependentOperator h(ops.dimension());
  h.add_term(Operator(ops.sigma_z(0) * ops.annihilation()), [=](double t) { return g * std::exp(-kI * w * t); });
  h.add_term(Operator(ops.sigma_z(0) * ops.creation()), [=](double t) { return g * std::exp(kI * w * t); });
  CVec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  QuantumState init = product_state(spec, plus, {thermal_mode(cutoff, 0.0)});
  return {std::move(ops), std::move(h), std::move(init), 2.5 / 20e3};
}

std::vector<QuantumState> driven_samples(const DrivenMode& m, bool dissipative, const EvolveOptions& opt = {}) {
  std::vector<LindbladChannel> ch;
  if (dissipative) {
    ch.push_back({Operator(std::sqrt(200.0) * m.ops.annihilation()), "damping"});
    ch.push_back({Operator(std::sqrt(100.0) * m.ops.creation()), "heating"});
    ch.push_back({Operator(std::sqrt(50.0) * m.ops.sigma_z(0)), "dephasing"});
  }
  std::vector<double> offsets;
  for (int k = 1; k <= 20; ++k) offsets.push_back(m.duration * k / 20.0);
  return evolve(m.initial, m.h, ch, m.duration, opt, offsets);
}

Outcome qdyn_trace(std::uint64_t) {
  const auto states = driven_samples(driven_mode(0.5, 16), true);
  double worst = 0.0;
  for (const auto& s : states) worst = std::max(worst, diagnose(s).trace_error);
  return {worst < 1e-9, "max |tr rho - 1| = " + num(worst)};
}

Outcome qdyn_hermiticity(std::uint64_t) {
  const auto states = driven_samples(driven_mode(0.5, 16), true);
  double worst = 0.0;
  for (const auto& s : states) worst = std::max(worst, diagnose(s).hermiticity_error);
  return {worst < 1e-10, "max hermiticity error = " + num(worst)};
}

Outcome qdyn_unitary(std::uint64_t) {
  const auto m = driven_mode(0.5, 16);
  const auto states = driven_samples(m, false);
  const double p0 = purity(m.initial);
  double worst = 0.0;
  for (const auto& s : states) worst = std::max(worst, std::abs(purity(s) - p0));
  return {worst < 1e-8, "max |tr rho^2 change| = " + num(worst)};
}

Outcome qdyn_truncation(std::uint64_t) {
  const auto ok = driven_samples(driven_mode(0.5, 16), false);
  double top = 0.0;
  for (const auto& s : ok) top = std::max(top, top_fock_population(s));
  bool rejected = false;
  try {
    driven_samples(driven_mode(3.0, 8), false);
  } catch (const TruncationError&) {
    rejected = true;
  }
  return {top < 1e-8 && rejected,
          "accepted run top-two population " + num(top) + (rejected ? ", undersized run rejected" : ", undersized run NOT rejected")};
}

Outcome qdyn_step_halving(std::uint64_t) {
  const auto m = driven_mode(0.5, 16);
  EvolveOptions ref;
  ref.integrator.rel_tol = 1e-12;
  ref.integrator.abs_tol = 1e-14;
  const auto reference = evolve_final(m.initial, m.h, {}, m.duration, ref);
  Eigen::SelfAdjointEigenSolver<CMat> eig(reference.rho);
  const CVec psi = eig.eigenvectors().col(eig.eigenvalues().size() - 1);
  const auto fixed = [&](double step) {
    EvolveOptions o;
    o.integrator.method = IntegratorConfig::Method::kFixedRK4;
    o.integrator.max_step = step;
    return fidelity_with_pure(evolve_final(m.initial, m.h, {}, m.duration, o), psi);
  };
  const double h = m.duration / 2000.0;
  const double d = std::abs(fixed(h) - fixed(h / 2));
  return {d < 1e-9, "|F(h) - F(h/2)| = " + num(d)};
}

// ------------------------------------------------------------------ gate

GateConfig rectangular_gate() {
  GateConfig c;
  c.shape = ShapeKind::kRectangular;
  return calibrated(c);
}

Outcome gate_loop_closure(std::uint64_t) {
  GateConfig c;
  c.shape = ShapeKind::kRectangular;
  c.rabi = analytic_rabi(c);
  const HilbertSpec spec{2, 20, {"com"}};
  OperatorSet ops(spec);
  const double loop = 1.0 / c.delta_g;
  const auto h = force_hamiltonian(c, ops, PulseWindow{0.0, 2.0 * loop});
  CVec plus = CVec::Constant(4, 0.5);
  const QuantumState init = product_state(spec, plus, {thermal_mode(20, 0.0)});
  EvolveOptions o;
  o.integrator.rel_tol = 1e-12;
  o.integrator.abs_tol = 1e-14;
  const auto states = evolve(init, h, {}, 2.0 * loop, o, {0.5 * loop, loop, 2.0 * loop});
  const auto s = [&](int i) { return entropy(partial_trace(states[i], {2}).rho); };
  const double mid = s(0);
  const double closed = std::max(s(1), s(2));
  return {closed < 1e-8 && mid > 1e-4,
          "entropy mid-loop " + num(mid) + ", after whole loops " + num(closed)};
}

Outcome gate_swap_symmetry(std::uint64_t) {
  const GateConfig c = rectangular_gate();
  NoiseParams n;
  n.heating_rate = 200.0;
  n.raman_rate = 20.0;
  const auto out = run_bell_sequence(c, n);
  CMat swap = CMat::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  const CMat swapped = swap * out.final_spin_state.rho * swap;
  const double diff = (swapped - out.final_spin_state.rho).norm();
  const auto pops = class_populations(swapped);
  double pop_diff = 0.0;
  for (int k = 0; k < 3; ++k) pop_diff = std::max(pop_diff, std::abs(pops[k] - out.populations[k]));
  const double f_diff = std::abs(std::real(bell_psi_plus().dot(swapped * bell_psi_plus())) - out.bell_fidelity);
  return {diff < 1e-10 && pop_diff < 1e-12 && f_diff < 1e-10,
          "|S rho S - rho| = " + num(diff) + ", population change " + num(pop_diff) + ", fidelity change " + num(f_diff)};
}

Outcome gate_analytic_numeric(std::uint64_t) {
  const GateConfig c = rectangular_gate();
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(c.gate_time() * i / 49.0);
  const auto num_pts = population_dynamics(c, grid);
  const auto ana = population_dynamics_analytic(c, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max({worst, std::abs(num_pts[i].p_dd - ana[i].p_dd), std::abs(num_pts[i].p_flip - ana[i].p_flip),
                      std::abs(num_pts[i].p_uu - ana[i].p_uu)});
  return {worst < 1e-6, "max population difference on 50 points = " + num(worst)};
}

Outcome gate_calibration_curvature(std::uint64_t) {
  const GateConfig c = calibrated(GateConfig{});
  std::vector<double> x{-5e-3, -2.5e-3, 2.5e-3, 5e-3};
  double sxx = 0.0, sxy = 0.0;
  for (const double d : x) {
    GateConfig off = c;
    off.rabi *= 1.0 + d;
    const double e = sequence_error(off, NoiseParams{});
    sxx += std::pow(d, 4);
    sxy += d * d * e;
  }
  const double curvature = sxy / sxx;
  const double expected = kPi * kPi / 4.0;
  const double rel = std::abs(curvature / expected - 1.0);
  return {rel < 0.10, "fitted curvature " + num(curvature) + " vs pi^2/4 (" + num(100 * rel) + "% off)"};
}

// ------------------------------------------------------------------ budget

Outcome budget_oracle(std::uint64_t) {
  const GateConfig c = calibrated(GateConfig{});
  const double tg = c.gate_time();
  struct Case {
    const char* name;
    NoiseParams noise;
    double analytic;
  };
  std::vector<Case> cases;
  {
    NoiseParams n;
    n.heating_rate = 22.0;
    cases.push_back({"heating", n, heating_error(22.0, tg, c.loops)});
  }
  {
    NoiseParams n;
    n.motional_tau = 0.2;
    cases.push_back({"motional-dephasing", n, dephasing_error(0.2, tg, c.loops)});
  }
  {
    NoiseParams n;
    n.raman_rate = 2.0;
    n.rayleigh_deph_rate = 1.0;
    cases.push_back({"scattering", n, scattering_error(2.0, 1.0, tg)});
  }
  {
    NoiseParams n;
    n.intensity_drift_frac = 5e-3;
    cases.push_back({"intensity-drift", n, intensity_drift_error(5e-3)});
  }
  Outcome out{true, ""};
  for (const auto& cs : cases) {
    const double numeric = sequence_error(c, cs.noise);
    const double rel = std::abs(cs.analytic / numeric - 1.0);
    out.passed = out.passed && rel < 0.10;
    out.detail += std::string(out.detail.empty() ? "" : "; ") + cs.name + " " + num(100 * rel) + "%";
  }
  const double spec_num = spectator_thermal_error_numeric(c, 0.094, 0.2);
  const double spec_rel = std::abs(thermal_error(0.094, 0.2) / spec_num - 1.0);
  out.passed = out.passed && spec_rel < 0.10;
  out.detail += "; spectator thermal " + num(100 * spec_rel) + "%";
  return out;
}

Outcome budget_monotone(std::uint64_t) {
  // Each formula is probed on [0, its validity bound].
  std::vector<std::pair<std::string, std::function<double(double)>>> f{
      {"thermal", [](double x) { return thermal_error(0.123, x); }},
      {"heating", [](double x) { return heating_error(x, 100e-6, 2); }},
      {"dephasing", [](double x) { return dephasing_error(1.0 / std::max(x, 1e-300), 100e-6, 2); }},
      {"spin-dephasing", [](double x) { return spin_dephasing_error(x, 100e-6); }},
      {"scattering-raman", [](double x) { return scattering_error(x, 1.0, 100e-6); }},
      {"scattering-rayleigh", [](double x) { return scattering_error(2.0, x, 100e-6); }},
      {"intensity-drift", [](double x) { return intensity_drift_error(0.049 * x); }},
      {"crosstalk", [](double x) { return crosstalk_error(x, 36.5e3); }},
  };
  std::string bad;
  for (const auto& [name, fn] : f) {
    double prev = -1.0;
    for (int k = 0; k <= 40; ++k) {
      const double rate = k == 0 ? 0.0 : 1e-4 * std::pow(10.0, k / 10.0);  // up to 1
      const double v = fn(rate);
      if (!(v >= 0.0) || v < prev) {
        bad += (bad.empty() ? "" : ", ") + name;
        break;
      }
      prev = v;
    }
  }
  return {bad.empty(), bad.empty() ? "8 channel formulas non-negative and non-decreasing" : "violations: " + bad};
}

Outcome budget_alpha(std::uint64_t) {
  const AlphaTable table;
  std::string detail;
  bool ok = true;
  double prev = 1e300;
  for (const int k : {1, 2, 4}) {
    const double a = alpha_coefficient(k);
    const double rel = std::abs(a / table.at(k) - 1.0);
    ok = ok && rel < 0.02 && a < prev;
    prev = a;
    detail += std::string(detail.empty() ? "" : ", ") + "alpha_" + std::to_string(k) + " = " + num(a);
  }
  return {ok, detail};
}

Outcome budget_total(std::uint64_t) {
  const ExperimentConfig cfg = builtin_profile("table1-100us");
  const auto b = budget_table(cfg.noise, cfg.gate);
  double sum = 0.0;
  for (const auto& [k, v] : b.entries()) sum += v;
  const auto table = ScatteringTable::constant_power(cfg.gate.gate_time(), cfg.noise.raman_rate,
                                                     cfg.noise.rayleigh_deph_rate, {3.8e-6, 520e-6});
  const auto curve = model_curves(cfg.noise, cfg.gate, table, {100e-6});
  const double model = curve.front().budget.total();
  const double bound = 1.1e-3 + 0.7e-3;
  return {sum == b.total() && model < bound,
          "total " + num(b.total()) + " equals row sum; model at 100 us " + num(model) + " < " + num(bound)};
}

// ------------------------------------------------------------------ spin echo

Outcome se_symmetry(std::uint64_t) {
  SpinEchoConfig a;
  SpinEchoConfig b = a;
  b.delta_f = -a.delta_f;
  double worst = 0.0;
  for (double tg = 10e-6; tg <= 400e-6; tg += 10e-6) worst = std::max(worst, std::abs(epsilon_se(a, tg) - epsilon_se(b, tg)));
  return {worst < 1e-14, "max |eps(df) - eps(-df)| over 40 gate times = " + num(worst)};
}

Outcome se_fast_pulses(std::uint64_t) {
  SpinEchoConfig c;
  const double tg = 100e-6;
  std::vector<double> e;
  for (const double scale : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    SpinEchoConfig s = c;
    s.rabi_mw *= scale;
    e.push_back(epsilon_se(s, tg));
  }
  bool mono = true;
  for (std::size_t i = 1; i < e.size(); ++i) mono = mono && e[i] <= e[i - 1];
  return {mono && e.back() < 1e-7, "eps_SE at 1x..1e4x Rabi: " + num(e.front()) + " -> " + num(e.back())};
}

Outcome se_ideal(std::uint64_t) {
  SpinEchoConfig c;
  c.delta_f = 0.0;
  double worst = 0.0;
  for (double tg = 0.0; tg <= 500e-6; tg += 25e-6) worst = std::max(worst, epsilon_se(c, tg));
  return {worst < 1e-12, "max 1 - F with ideal pulses and gate = " + num(worst)};
}

// ------------------------------------------------------------------ tomography

Outcome tomo_consistency(std::uint64_t seed) {
  std::string detail;
  bool ok = true;
  for (const std::int64_t shots : {100, 1000, 10000}) {
    BiasStudyParams p;
    p.shots = shots;
    p.n_datasets = 200;
    p.seed = derive_seed(seed, static_cast<std::uint64_t>(shots));
    const auto r = bias_study(p);
    // O(1/shots) bias bound on top of the ensemble noise.
    ok = ok && std::abs(r.ml_bias) < 2.0 * r.ml_bias_se + 1.0 / static_cast<double>(shots);
    detail += std::string(detail.empty() ? "" : "; ") + std::to_string(shots) + " shots: bias " + num(r.ml_bias) +
              " +- " + num(r.ml_bias_se);
  }
  return {ok, detail};
}

Outcome tomo_phase(std::uint64_t seed) {
  double worst = 0.0;
  bool in_range = true;
  int k = 0;
  for (double phi0 = -2.0; phi0 <= 5.0; phi0 += 0.7, ++k) {
    const auto d = synthesize_parity(0.9, 0.0, phi0, uniform_phases(16), 2000, derive_seed(seed, 100 + k));
    const auto f = fit_ml_binomial(d);
    in_range = in_range && f.phi0 >= 0.0 && f.phi0 < kPi;
    const double diff = std::remainder(f.phi0 - phi0, kPi);
    worst = std::max(worst, std::abs(diff));
  }
  return {in_range && worst < 0.05, "phi0 in [0, pi); max distance mod pi = " + num(worst)};
}

Outcome tomo_probabilities(std::uint64_t seed) {
  double lo = 1.0, hi = 0.0;
  int k = 0;
  for (const double c : {0.9, 0.995, 0.999, 1.0})
    for (int rep = 0; rep < 20; ++rep, ++k) {
      const auto d = synthesize_parity(c, 0.0, 0.3, uniform_phases(16), 1000, derive_seed(seed, 200 + k));
      const auto f = fit_ml_binomial(d);
      for (const double phi : d.phases) {
        const double p = fringe_probability(f.c, f.c0, f.phi0, phi);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
  return {lo >= -1e-12 && hi <= 1.0 + 1e-12, "fitted p at data phases within [" + num(lo) + ", " + num(hi) + "]"};
}

Outcome tomo_ml_vs_ls(std::uint64_t seed) {
  double worst = 1e300;
  for (int k = 0; k < 50; ++k) {
    const auto d = synthesize_parity(0.98, 0.01, 0.4, uniform_phases(16), 500, derive_seed(seed, 300 + k));
    const auto ml = fit_ml_binomial(d);
    const auto ls = fit_least_squares(d);
    const double ls_ll = log_likelihood(d, ls.c, ls.c0, ls.phi0);
    if (std::isfinite(ls_ll)) worst = std::min(worst, ml.log_likelihood - ls_ll);
  }
  return {worst >= -1e-9, "min logL(ML) - logL(LS) over 50 datasets = " + num(worst)};
}

// ------------------------------------------------------------------ readout

Outcome ro_stochastic(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eps(0.0, 0.05);
  double col = 0.0, trip = 0.0;
  for (int k = 0; k < 50; ++k) {
    const SpamMap m = build_spam_map(eps(rng), eps(rng));
    for (int j = 0; j < 3; ++j) col = std::max(col, std::abs(m.m.col(j).sum() - 1.0));
    Eigen::Vector3d v(eps(rng) + 0.1, eps(rng) + 0.2, eps(rng) + 0.3);
    v /= v.sum();
    trip = std::max(trip, (correct_populations(m.m * v, m) - v).cwiseAbs().maxCoeff());
  }
  return {col < 1e-12 && trip < 1e-12, "column-sum error " + num(col) + ", round trip " + num(trip)};
}

Outcome ro_detect_time(std::uint64_t) {
  std::vector<double> errors;
  for (const double t : {0.1, 0.2, 0.5, 1.0, 1.9, 4.0}) {
    ReadoutModel m;
    m.shelf_lifetime = std::numeric_limits<double>::infinity();
    m.detect_time = t;
    m.thresholds = optimal_thresholds(m);
    double e = 0.0;
    for (int k = 0; k < 3; ++k) e += 1.0 - class_probabilities(m, k)[k];
    errors.push_back(e);
  }
  bool mono = true;
  for (std::size_t i = 1; i < errors.size(); ++i) mono = mono && errors[i] <= errors[i - 1];
  return {mono, "misclassification 0.1 ms -> 4 ms: " + num(errors.front()) + " -> " + num(errors.back())};
}

Outcome ro_unbiased(std::uint64_t seed) {
  ReadoutModel m;
  m.thresholds = optimal_thresholds(m);
  m.prep_error = 1.5e-3;
  const double truth = spam_truth(m).eps_spam;
  const int replicas = 100;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const double e = estimate_spam(m, 4000, derive_seed(seed, 400 + r)).eps_spam;
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / replicas;
  const double se = std::sqrt((sum2 / replicas - mean * mean) / (replicas - 1));
  return {std::abs(mean - truth) < 2.0 * se, "mean " + num(mean) + " vs truth " + num(truth) + " (se " + num(se) + ")"};
}

// ------------------------------------------------------------------ rb

RbPlan rb_plan(std::uint64_t seed) {
  RbPlan p;
  p.sequence_lengths = {1, 50, 100, 200, 400};
  p.seed = seed;
  return p;
}

Outcome rb_white(std::uint64_t seed) {
  NoiseModel1Q n;
  n.depolarizing_per_gate = 1e-3;
  // Length-ordered trend of the normalised residuals, pooled over replicas.
  double sxy = 0.0, sxx = 0.0;
  int count = 0;
  for (int r = 0; r < 8; ++r) {
    const auto fit = fit_decay(simulate_rb(rb_plan(derive_seed(seed, 500 + r)), n));
    const double mean_idx = 0.5 * (fit.lengths.size() - 1);
    for (std::size_t i = 0; i < fit.lengths.size(); ++i) {
      const double model = fit.a * std::pow(fit.p, fit.lengths[i]) + fit.b;
      const double z = (fit.survival[i] - model) / fit.survival_se[i];
      const double x = static_cast<double>(i) - mean_idx;
      sxy += x * z;
      sxx += x * x;
      ++count;
    }
  }
  const double t = sxy / std::sqrt(sxx);  // unit-variance residuals
  return {std::abs(t) < 2.0, "trend statistic " + num(t) + " over " + std::to_string(count) + " residuals"};
}

Outcome rb_phase_invariance(std::uint64_t seed) {
  NoiseModel1Q n;
  n.depolarizing_per_gate = 2e-4;
  n.amplitude_error_frac = 2e-3;
  n.detuning_error = 100.0;
  RbPlan a = rb_plan(seed);
  RbPlan b = a;
  b.phase_offset = 0.7;
  const auto seqs = generate_sequences(a);
  double worst = 0.0;
  for (const auto& s : seqs)
    worst = std::max(worst, std::abs(sequence_survival(s, n, a.phase_offset, 0) - sequence_survival(s, n, b.phase_offset, 0)));
  const double ea = fit_decay(simulate_rb(a, n)).error_per_gate;
  const double eb = fit_decay(simulate_rb(b, n)).error_per_gate;
  return {worst < 1e-10 && std::abs(ea - eb) < 1e-9,
          "max survival change " + num(worst) + ", eps " + num(ea) + " vs " + num(eb)};
}

Outcome rb_analytic(std::uint64_t seed) {
  NoiseModel1Q n;
  n.depolarizing_per_gate = 1e-3;
  const RbPlan p = rb_plan(seed);
  const auto fit = fit_decay(simulate_rb(p, n));
  double worst = 0.0;
  for (std::size_t i = 0; i < fit.lengths.size(); ++i) {
    const double expected = 0.5 + 0.5 * std::pow(1.0 - 2.0 * n.depolarizing_per_gate, fit.lengths[i]);
    // Binomial spread at the analytic value; the plug-in estimate collapses near 1.
    const double se = std::sqrt(expected * (1.0 - expected) / (static_cast<double>(p.n_sequences) * p.shots));
    worst = std::max(worst, std::abs(fit.survival[i] - expected) / se);
  }
  return {worst < 3.5, "max |survival - analytic| = " + num(worst) + " sigma"};
}

// ------------------------------------------------------------------ config / cli

Outcome cfg_roundtrip(std::uint64_t) {
  std::string bad;
  for (const auto& [name, c] : builtin_profiles()) {
    const std::string text = to_ini(c);
    if (to_ini(parse_config(text)) != text || config_hash(parse_config(text)) != config_hash(c)) bad += name + " ";
  }
  return {bad.empty(), bad.empty() ? "all profiles round-trip byte-identically" : "lossy: " + bad};
}

Outcome cfg_provenance(std::uint64_t) {
  std::string bad;
  for (const auto& [name, c] : builtin_profiles()) {
    for (const auto& key : config_keys()) {
      if (key.rfind("meta.", 0) == 0) continue;
      const auto it = c.provenance.find(key);
      if (it == c.provenance.end() || it->second.note.empty()) bad += name + ":" + key + " ";
    }
    if (!validate(c).empty()) bad += name + ":invalid ";
  }
  return {bad.empty(), bad.empty() ? "every profile parameter carries a documented tag" : "untagged: " + bad};
}

Outcome cli_determinism(std::uint64_t seed) {
  const auto run = [&] {
    const auto d = synthesize_parity(0.995, 0.0, 0.3, uniform_phases(16), 1000, seed);
    const auto f = fit_ml_binomial(d);
    RbPlan p = rb_plan(seed);
    p.n_sequences = 4;
    NoiseModel1Q n;
    n.depolarizing_per_gate = 1e-3;
    return to_table(d).to_csv() + format_double(f.c) + to_table(simulate_rb(p, n, 2)).to_csv() +
           format_double(estimate_spam(ReadoutModel{}, 500, seed).eps_spam);
  };
  const bool same = run() == run();
  return {same, same ? "repeated pipelines are byte-identical" : "outputs differ between runs"};
}

struct Entry {
  Invariant inv;
  CheckFn fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table{
      {{"qdyn.trace", "qdyn-core", "trace preserved to 1e-9"}, qdyn_trace},
      {{"qdyn.hermiticity", "qdyn-core", "Hermiticity preserved to 1e-10"}, qdyn_hermiticity},
      {{"qdyn.unitary-limit", "qdyn-core", "no channels: purity constant to 1e-8"}, qdyn_unitary},
      {{"qdyn.truncation", "qdyn-core", "top-two Fock population < 1e-8 or the run is rejected"}, qdyn_truncation},
      {{"qdyn.step-halving", "qdyn-core", "halving the fixed step moves the fidelity by < 1e-9"}, qdyn_step_halving},
      {{"gate.loop-closure", "gate-sim", "motional entropy < 1e-8 after whole loops"}, gate_loop_closure},
      {{"gate.ion-swap", "gate-sim", "ion relabelling leaves the outcome unchanged"}, gate_swap_symmetry},
      {{"gate.analytic-numeric", "gate-sim", "closed-form populations match the oracle to 1e-6"}, gate_analytic_numeric},
      {{"gate.calibration-curvature", "gate-sim", "error curvature in Omega is pi^2/4 within 10%"}, gate_calibration_curvature},
      {{"budget.oracle", "error-budget", "analytic channels match the master equation within 10%"}, budget_oracle},
      {{"budget.monotone", "error-budget", "errors non-negative and non-decreasing in their rates"}, budget_monotone},
      {{"budget.alpha", "error-budget", "alpha_K within 2% and decreasing in K"}, budget_alpha},
      {{"budget.total", "error-budget", "total is the row sum; 100 us model below the measured +1 sigma"}, budget_total},
      {{"spinecho.symmetry", "spinecho-sim", "eps_SE invariant under df -> -df"}, se_symmetry},
      {{"spinecho.fast-pulses", "spinecho-sim", "eps_SE -> 0 monotonically as Omega_mw grows"}, se_fast_pulses},
      {{"spinecho.ideal", "spinecho-sim", "ideal pulses and gate give psi+ to 1e-12"}, se_ideal},
      {{"tomography.consistency", "tomography-fit", "ML bias within O(1/shots) at 100, 1000, 10000 shots"}, tomo_consistency},
      {{"tomography.phase", "tomography-fit", "phi0 reported modulo pi in [0, pi)"}, tomo_phase},
      {{"tomography.probabilities", "tomography-fit", "fitted probabilities in [0, 1] at the data phases"}, tomo_probabilities},
      {{"tomography.ml-vs-ls", "tomography-fit", "logL at the ML optimum >= logL at the LS optimum"}, tomo_ml_vs_ls},
      {{"readout.map", "readout-spam", "M column-stochastic; correction inverts it"}, ro_stochastic},
      {{"readout.detect-time", "readout-spam", "misclassification decreases with detect_time without decay"}, ro_detect_time},
      {{"readout.unbiased", "readout-spam", "eps_SPAM estimate within 2 sigma of truth over 100 replicas"}, ro_unbiased},
      {{"rbm.white-residuals", "rbm", "depolarizing residuals show no length-ordered trend at 2 sigma"}, rb_white},
      {{"rbm.phase-invariance", "rbm", "fitted eps invariant under a global phase of the gate set"}, rb_phase_invariance},
      {{"rbm.analytic-survival", "rbm", "survival matches 1/2 + 1/2 (1 - 2 eps)^l"}, rb_analytic},
      {{"config.roundtrip", "config-io", "save -> load is lossless for every profile"}, cfg_roundtrip},
      {{"config.provenance", "config-io", "every profile parameter carries a provenance tag"}, cfg_provenance},
      {{"cli.determinism", "cli", "identical (config, seed) give byte-identical outputs"}, cli_determinism},
  };
  return table;
}

}  // namespace

const std::vector<Invariant>& invariant_manifest() {
  static const std::vector<Invariant> manifest = [] {
    std::vector<Invariant> m;
    for (const auto& e : entries()) m.push_back(e.inv);
    m.push_back({"cli.coverage", "cli", "validate covers every module invariant and emits this manifest"});
    return m;
  }();
  return manifest;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

Table ValidationReport::to_table() const {
  Table t;
  t.columns = {"id", "module", "status", "detail"};
  for (const auto& c : checks) t.add_row({c.id, c.module, std::string(c.passed ? "pass" : "FAIL"), c.detail});
  return t;
}

Json ValidationReport::coverage_manifest() const {
  Json out = Json::array();
  for (const auto& inv : invariant_manifest()) {
    int n = 0;
    bool ok = true;
    for (const auto& c : checks)
      if (c.id == inv.id) {
        ++n;
        ok = ok && c.passed;
      }
    out.push_back({{"id", inv.id}, {"module", inv.module}, {"statement", inv.statement}, {"checks", n},
                   {"status", n == 0 ? "missing" : ok ? "pass" : "fail"}});
  }
  return out;
}

ValidationReport run_validation(std::uint64_t seed, unsigned jobs) {
  const auto& list = entries();
  ValidationReport report;
  report.checks = parallel_map(list.size(), jobs, [&](std::size_t i) {
    InvariantCheck c{list[i].inv.id, list[i].inv.module, false, ""};
    try {
      const Outcome o = list[i].fn(derive_seed(seed, i));
      c.passed = o.passed;
      c.detail = o.detail;
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    return c;
  });
  std::set<std::string> covered;
  for (const auto& c : report.checks) covered.insert(c.id);
  std::string missing;
  for (const auto& inv : invariant_manifest())
    if (inv.id != "cli.coverage" && !covered.count(inv.id)) missing += inv.id + " ";
  std::set<std::string> modules;
  for (const auto& inv : invariant_manifest()) modules.insert(inv.module);
  report.checks.push_back({"cli.coverage", "cli", missing.empty() && modules.size() == 9,
                           missing.empty() ? std::to_string(report.checks.size()) + " checks over " +
                                                 std::to_string(modules.size()) + " modules"
                                           : "missing: " + missing});
  return report;
}

}  // namespace iongate
