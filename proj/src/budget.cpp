#include "iongate/budget.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "iongate/spin.hpp"

namespace iongate {

std::vector<std::string> diagnostics(const NoiseParams& n) {
  std::vector<std::string> d;
  const auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) d.push_back(std::string("noise.") + name + " must be finite and >= 0");
  };
  nonneg(n.nbar_gate, "nbar_gate");
  nonneg(n.nbar_spec, "nbar_spec");
  nonneg(n.heating_rate, "heating_rate");
  nonneg(n.spin_dephasing_coeff, "spin_dephasing_coeff");
  nonneg(n.raman_rate, "raman_rate");
  nonneg(n.rayleigh_deph_rate, "rayleigh_deph_rate");
  if (!(n.motional_tau > 0.0)) d.push_back("noise.motional_tau must be > 0 (inf disables)");
  if (!(std::abs(n.intensity_drift_frac) < 0.05)) d.push_back("noise.intensity_drift_frac must satisfy |x| < 0.05");
  return d;
}

// ---------------------------------------------------------------- tables

AlphaTable::AlphaTable() : values_{{1, 0.686}, {2, 0.297}, {4, 0.137}} {}

AlphaTable::AlphaTable(std::map<int, double> values, bool numeric_fallback)
    : values_(std::move(values)), numeric_fallback_(numeric_fallback) {}

double AlphaTable::at(int loops) const {
  if (loops < 1) throw Error("alpha_K requires K >= 1");
  const auto it = values_.find(loops);
  if (it != values_.end()) return it->second;
  if (!numeric_fallback_) throw Error("alpha_K not tabulated for K=" + std::to_string(loops));
  const double a = alpha_coefficient(loops);
  values_[loops] = a;
  return a;
}

void ErrorBudget::add(const std::string& label, double error) {
  if (!(error >= 0.0)) throw Error("budget entry '" + label + "' must be >= 0");
  for (const auto& e : entries_)
    if (e.first == label) throw Error("duplicate budget entry '" + label + "'");
  entries_.emplace_back(label, error);
}

double ErrorBudget::at(const std::string& label) const {
  for (const auto& e : entries_)
    if (e.first == label) return e.second;
  throw Error("no budget entry '" + label + "'");
}

double ErrorBudget::total() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

// ---------------------------------------------------------------- formulas

double thermal_error(double eta, double nbar) {
  if (!(nbar >= 0.0)) throw Error("thermal_error: nbar must be >= 0");
  const double e2 = eta * eta;
  return 0.25 * kPi * kPi * e2 * e2 * nbar * (2.0 * nbar + 1.0);
}

double heating_error(double heating_rate, double t_g, int loops) {
  if (!(heating_rate >= 0.0) || !(t_g >= 0.0) || loops < 1) throw Error("heating_error: invalid arguments");
  const double e = heating_rate * t_g / (2.0 * loops);
  if (e > 0.05) {
    std::ostringstream os;
    os << "heating error " << e << " is outside the eps << 0.1 regime of the linear formula";
    warn(os.str());
  }
  return e;
}

double dephasing_error(double motional_tau, double t_g, int loops, const AlphaTable& alphas) {
  if (!(motional_tau > 0.0) || !(t_g >= 0.0)) throw Error("dephasing_error: invalid arguments");
  if (std::isinf(motional_tau)) return 0.0;
  return alphas.at(loops) * t_g / motional_tau;
}

double contrast_to_bell_error(double two_ion_contrast) { return 0.5 * (1.0 - two_ion_contrast); }

double spin_dephasing_error(double beta, double t_g) {
  if (!(beta >= 0.0)) throw Error("spin_dephasing_error: beta must be >= 0");
  const double c1 = std::max(0.0, 1.0 - beta * t_g * t_g);
  return contrast_to_bell_error(c1 * c1);
}

double calibrate_spin_dephasing(double target, double t_g) {
  if (!(target >= 0.0 && target < 0.5) || !(t_g > 0.0)) throw CalibrationError("spin dephasing: invalid target");
  // (1 - (1 - b t^2)^2)/2 = target  =>  1 - b t^2 = sqrt(1 - 2 target).
  return (1.0 - std::sqrt(1.0 - 2.0 * target)) / (t_g * t_g);
}

double scattering_error(double raman_rate, double rayleigh_deph_rate, double t_eff) {
  if (!(raman_rate >= 0.0) || !(rayleigh_deph_rate >= 0.0) || !(t_eff >= 0.0))
    throw Error("scattering_error: rates and time must be >= 0");
  const double c1 = std::exp(-rayleigh_deph_rate * t_eff);
  return 2.0 * raman_rate * t_eff * kRamanEventInfidelity + contrast_to_bell_error(c1 * c1);
}

double calibrate_raman_rate(double target, double rayleigh_deph_rate, double t_eff) {
  const double rest = target - scattering_error(0.0, rayleigh_deph_rate, t_eff);
  if (!(rest >= 0.0) || !(t_eff > 0.0)) throw CalibrationError("Raman rate calibration: Rayleigh part exceeds the target");
  return rest / (2.0 * t_eff * kRamanEventInfidelity);
}

double intensity_drift_error(double drift_frac) {
  if (!(std::abs(drift_frac) < 0.05)) throw Error("intensity_drift_error: |drift| must be < 0.05");
  return 0.25 * kPi * kPi * drift_frac * drift_frac;
}

double crosstalk_error(double rabi_off_null, double rabi_on_null) {
  if (!(rabi_on_null > 0.0)) throw Error("crosstalk_error: on-null Rabi frequency must be > 0");
  const double r = rabi_off_null / rabi_on_null;
  return 0.25 * kPi * kPi * r * r;
}

double off_resonant_error(const GateConfig& cfg) {
  if (cfg.lightshift_amp == 0.0) return 0.0;
  return carrier_lightshift_error_quadrature(cfg, cfg.pulse_shape()).average;
}

ErrorBudget budget_table(const NoiseParams& noise, const GateConfig& cfg, const AlphaTable& alphas) {
  throw_if_invalid(diagnostics(noise));
  throw_if_invalid(diagnostics(cfg));
  const double tg = cfg.gate_time();
  ErrorBudget b;
  b.add(kScattering, scattering_error(noise.raman_rate, noise.rayleigh_deph_rate, tg));
  b.add(kMotional, heating_error(noise.heating_rate, tg, cfg.loops) +
                       dephasing_error(noise.motional_tau, tg, cfg.loops, alphas));
  b.add(kSpinDephasing, spin_dephasing_error(noise.spin_dephasing_coeff, tg));
  b.add(kIntensityDrift, intensity_drift_error(noise.intensity_drift_frac));
  b.add(kThermal, thermal_error(cfg.eta_gate, noise.nbar_gate) + thermal_error(cfg.eta_spec, noise.nbar_spec));
  b.add(kOffResonant, off_resonant_error(cfg));
  return b;
}

// ---------------------------------------------------------------- curves

ScatteringTable ScatteringTable::constant_power(double anchor_t_g, double raman_rate,
                                                double rayleigh_rate, const std::vector<double>& t_g) {
  ScatteringTable t;
  t.t_g = t_g;
  std::sort(t.t_g.begin(), t.t_g.end());
  for (double x : t.t_g) {
    const double s = (anchor_t_g / x) * (anchor_t_g / x);
    t.raman.push_back(raman_rate * s);
    t.rayleigh.push_back(rayleigh_rate * s);
  }
  throw_if_invalid(diagnostics(t));
  return t;
}

std::vector<std::string> diagnostics(const ScatteringTable& t) {
  std::vector<std::string> d;
  if (t.t_g.size() < 2) d.push_back("scattering table needs at least two points");
  if (t.raman.size() != t.t_g.size() || t.rayleigh.size() != t.t_g.size())
    d.push_back("scattering table columns must have equal length");
  for (std::size_t i = 0; i < t.t_g.size(); ++i) {
    if (!(t.t_g[i] > 0.0)) d.push_back("scattering table t_g must be > 0");
    if (i > 0 && !(t.t_g[i] > t.t_g[i - 1])) d.push_back("scattering table t_g must be strictly ascending");
  }
  for (double r : t.raman)
    if (!(r > 0.0)) d.push_back("scattering table rates must be > 0");
  for (double r : t.rayleigh)
    if (!(r > 0.0)) d.push_back("scattering table rates must be > 0");
  return d;
}

std::pair<double, double> ScatteringTable::rates_at(double t) const {
  throw_if_invalid(diagnostics(*this));
  // Log-log interpolation, linear extrapolation of the end segments.
  std::size_t i = 1;
  while (i + 1 < t_g.size() && t > t_g[i]) ++i;
  const double u = (std::log(t) - std::log(t_g[i - 1])) / (std::log(t_g[i]) - std::log(t_g[i - 1]));
  const auto interp = [&](const std::vector<double>& y) {
    return std::exp(std::log(y[i - 1]) + u * (std::log(y[i]) - std::log(y[i - 1])));
  };
  return {interp(raman), interp(rayleigh)};
}

std::vector<ModelPoint> model_curves(const NoiseParams& anchor_noise, const GateConfig& anchor_cfg,
                                     const ScatteringTable& table, const std::vector<double>& t_g,
                                     const AlphaTable& alphas) {
  const double t0 = anchor_cfg.gate_time();
  std::vector<ModelPoint> out;
  out.reserve(t_g.size());
  for (double t : t_g) {
    if (!(t > 0.0)) throw Error("model_curves: t_g must be > 0");
    GateConfig c = anchor_cfg;
    c.delta_g = c.loops / t;
    c.lightshift_amp = anchor_cfg.lightshift_amp * t0 / t;
    // Shorter gates keep both ramps inside each pulse.
    c.ramp_time = std::min(anchor_cfg.ramp_time, 0.999 * t / (2.0 * kPi));
    NoiseParams n = anchor_noise;
    std::tie(n.raman_rate, n.rayleigh_deph_rate) = table.rates_at(t);
    out.push_back({t, budget_table(n, c, alphas)});
  }
  return out;
}

std::vector<std::string> largest_channels(const std::vector<ModelPoint>& curves, std::size_t count) {
  std::vector<std::pair<double, std::string>> peak;
  if (curves.empty()) return {};
  for (const auto& [label, _] : curves.front().budget.entries()) {
    double m = 0.0;
    for (const auto& p : curves) m = std::max(m, p.budget.at(label));
    peak.emplace_back(m, label);
  }
  std::stable_sort(peak.begin(), peak.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(count, peak.size()); ++i) out.push_back(peak[i].second);
  return out;
}

std::vector<double> scattering_detuning_curve(const NoiseParams& anchor_noise, double anchor_t_g,
                                              double anchor_detuning, double t_g,
                                              const std::vector<double>& detunings, double offset) {
  if (!(anchor_t_g > 0.0) || !(t_g > 0.0) || anchor_detuning == 0.0)
    throw Error("scattering_detuning_curve: invalid anchor");
  std::vector<double> out;
  for (double d : detunings) {
    if (d == 0.0) throw Error("scattering_detuning_curve: detuning must be non-zero");
    // Intensity ~ Omega |Delta| at fixed Omega, scattering ~ intensity / Delta^2.
    const double s = (anchor_t_g / t_g) * std::abs(anchor_detuning / d);
    out.push_back(scattering_error(anchor_noise.raman_rate * s, anchor_noise.rayleigh_deph_rate * s, t_g) + offset);
  }
  return out;
}

// ---------------------------------------------------------------- multi-gate

double multi_gate_error(int n_gates, double per_gate_error, double drift_frac) {
  if (n_gates < 0) throw Error("multi_gate_error: n_gates must be >= 0");
  const double n = n_gates;
  return n * per_gate_error + 0.25 * kPi * kPi * (n * drift_frac) * (n * drift_frac);
}

double multi_gate_error_simulated(int n_gates, double per_gate_error, double drift_frac) {
  if (n_gates < 0 || !(per_gate_error >= 0.0 && per_gate_error <= 0.75))
    throw Error("multi_gate_error_simulated: invalid arguments");
  const CVec plus = CVec::Constant(4, 0.5);
  const CMat ideal = ideal_phase_gate(kPi / 4);
  const double s = (1.0 + drift_frac) * (1.0 + drift_frac);
  const CMat actual = ideal_phase_gate(kPi / 4 * s);
  const double p = 4.0 * per_gate_error / 3.0;
  CMat rho = plus * plus.adjoint();
  CVec target = plus;
  for (int k = 0; k < n_gates; ++k) {
    rho = actual * rho * actual.adjoint();
    rho = (1.0 - p) * rho + p * CMat::Identity(4, 4) / 4.0;
    target = ideal * target;
  }
  return 1.0 - std::real((target.adjoint() * rho * target)(0, 0));
}

QuadraticFit fit_linear_quadratic(const std::vector<int>& n, const std::vector<double>& error) {
  if (n.size() != error.size() || n.size() < 2) throw FitError("quadratic fit needs >= 2 matched points");
  double s2 = 0, s3 = 0, s4 = 0, y1 = 0, y2 = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = n[i];
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
    y1 += x * error[i];
    y2 += x * x * error[i];
  }
  const double det = s2 * s4 - s3 * s3;
  if (!(std::abs(det) > 0.0)) throw FitError("quadratic fit is singular");
  return {(y1 * s4 - y2 * s3) / det, (s2 * y2 - s3 * y1) / det};
}

// ---------------------------------------------------------------- oracles

namespace {

CMat direct_gate_spin_state(double t_g, int loops, double eta, const NoiseParams& noise,
                            const OracleOptions& options) {
  throw_if_invalid(diagnostics(noise));
  if (!(t_g > 0.0) || loops < 1 || !(eta > 0.0)) throw Error("direct gate: invalid arguments");
  GateConfig c;
  c.eta_gate = eta;
  c.loops = loops;
  c.delta_g = loops / t_g;
  c.shape = ShapeKind::kRectangular;
  // Closed rectangular loops: differential phase 4 f^2 t_g / w = pi/2.
  const double f = std::sqrt(kPi * c.omega() / (8.0 * t_g));
  c.rabi = 2.0 * f / eta * (1.0 + noise.intensity_drift_frac);

  const HilbertSpec spec{2, options.fock_cutoff, {"com"}};
  const OperatorSet ops = build_operators(spec);
  const TimeDependentOperator h = force_hamiltonian(c, ops, PulseWindow{0.0, t_g});
  const CVec plus = CVec::Constant(4, 0.5);
  const QuantumState s0 = product_state(spec, plus, {thermal_mode(options.fock_cutoff, noise.nbar_gate)});
  const QuantumState s1 = evolve_final(s0, h, noise_channels(noise, ops), t_g, options.evolve);
  return partial_trace(s1, {0, 1}).rho;
}

CVec dominant_eigenvector(const CMat& rho) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()));
  return es.eigenvectors().col(rho.rows() - 1);
}

double overlap_error(const CVec& psi, const CMat& rho) {
  return 1.0 - std::real((psi.adjoint() * rho * psi)(0, 0));
}

}  // namespace

double direct_gate_error(double t_g, int loops, double eta, const NoiseParams& noise,
                         const OracleOptions& options) {
  const CVec ref = dominant_eigenvector(direct_gate_spin_state(t_g, loops, eta, NoiseParams{}, options));
  return overlap_error(ref, direct_gate_spin_state(t_g, loops, eta, noise, options));
}

double alpha_coefficient(int loops, const OracleOptions& options) {
  const double tg = 100e-6, eta = 0.123;
  const CVec ref = dominant_eigenvector(direct_gate_spin_state(tg, loops, eta, NoiseParams{}, options));
  double sxy = 0.0, sxx = 0.0;
  for (double x : {2.5e-4, 5e-4, 1e-3}) {
    NoiseParams n;
    n.motional_tau = tg / x;
    const double e = overlap_error(ref, direct_gate_spin_state(tg, loops, eta, n, options));
    sxy += x * e;
    sxx += x * x;
  }
  return sxy / sxx;
}

double sequence_error(const GateConfig& cfg, const NoiseParams& noise, const SequenceOptions& options) {
  return std::max(0.0, 1.0 - run_bell_sequence(cfg, noise, std::nullopt, options).bell_fidelity);
}

double spectator_thermal_error_numeric(const GateConfig& calibrated_cfg, double eta_spec, double nbar) {
  if (!(nbar >= 0.0)) throw Error("spectator thermal error: nbar must be >= 0");
  const double x = eta_spec * eta_spec;
  double acc = 0.0, weight = 0.0;
  for (unsigned n = 0; n < 400 && weight < 1.0 - 1e-9; ++n) {
    const double p = std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1.0);
    GateConfig c = calibrated_cfg;
    c.rabi = calibrated_cfg.rabi * std::laguerre(n, x);
    acc += p * sequence_error(c, NoiseParams{});
    weight += p;
    if (nbar == 0.0) break;
  }
  return acc / weight;
}

double gate_mode_thermal_error_numeric(const GateConfig& calibrated_exact_cfg, double nbar) {
  NoiseParams n;
  n.nbar_gate = nbar;
  return sequence_error(calibrated_exact_cfg, n);
}

}  // namespace iongate
