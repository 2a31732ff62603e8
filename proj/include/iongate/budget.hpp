#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iongate/gate.hpp"
#include "iongate/noise.hpp"

namespace iongate {

// Motional-dephasing coefficients alpha_K in eps_d = alpha_K t_g / tau.
class AlphaTable {
 public:
  AlphaTable();
  explicit AlphaTable(std::map<int, double> values, bool numeric_fallback = true);

  // Tabulated value, or a master-equation slope fit (cached) when K is missing
  // and the fallback is enabled.
  double at(int loops) const;
  bool contains(int loops) const { return values_.count(loops) != 0; }
  const std::map<int, double>& values() const { return values_; }

 private:
  mutable std::map<int, double> values_;
  bool numeric_fallback_ = true;
};

// Channel label -> error, in insertion order.
class ErrorBudget {
 public:
  void add(const std::string& label, double error);
  double at(const std::string& label) const;
  double total() const;
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Table-1 channel labels.
inline constexpr const char* kScattering = "scattering";
inline constexpr const char* kMotional = "motional";
inline constexpr const char* kSpinDephasing = "spin-dephasing";
inline constexpr const char* kIntensityDrift = "intensity-drift";
inline constexpr const char* kThermal = "thermal";
inline constexpr const char* kOffResonant = "off-resonant";

// (pi^2/4) eta^4 nbar (2 nbar + 1).
double thermal_error(double eta, double nbar);
// ndot t_g / (2K); warns when the result leaves the eps << 0.1 regime.
double heating_error(double heating_rate, double t_g, int loops);
// alpha_K t_g / tau.
double dephasing_error(double motional_tau, double t_g, int loops, const AlphaTable& alphas = {});

// Bell error of a two-ion parity-contrast loss: (1 - C)/2.
double contrast_to_bell_error(double two_ion_contrast);
// Single-ion echo contrast 1 - beta t^2, two independent ions, mapped to Bell error.
double spin_dephasing_error(double beta, double t_g);
// beta giving `target` at t_g.
double calibrate_spin_dephasing(double target, double t_g);

// Mean Bell infidelity left by one qubit-subspace spin flip during the sequence:
// the flip projects the ion onto a z eigenstate, which keeps 1/4 overlap.
inline constexpr double kRamanEventInfidelity = 0.75;

// Raman flips at gamma_R on either ion (2 gamma_R t_eff events, each costing
// kRamanEventInfidelity) plus Rayleigh dephasing mapped through the contrast
// map (single-ion contrast exp(-gamma_el t_eff)).
double scattering_error(double raman_rate, double rayleigh_deph_rate, double t_eff);
// gamma_R giving `target` scattering error with the given Rayleigh rate.
double calibrate_raman_rate(double target, double rayleigh_deph_rate, double t_eff);

// (pi^2/4) (dOmega/Omega)^2.
double intensity_drift_error(double drift_frac);
// (pi^2/4) (Omega'/Omega)^2.
double crosstalk_error(double rabi_off_null, double rabi_on_null);

// Phase-averaged carrier light-shift error with the configured pulse shape.
double off_resonant_error(const GateConfig& cfg);

ErrorBudget budget_table(const NoiseParams& noise, const GateConfig& cfg,
                         const AlphaTable& alphas = {});

// Scattering rates against gate time for the detuning sweep at constant beam
// power, interpolated log-log between the tabulated points.
struct ScatteringTable {
  std::vector<double> t_g;       // s, ascending
  std::vector<double> raman;     // 1/s
  std::vector<double> rayleigh;  // 1/s

  // Rates ~ 1/t_g^2 (Omega ~ 1/Delta, scattering ~ 1/Delta^2) through the anchor.
  static ScatteringTable constant_power(double anchor_t_g, double raman_rate, double rayleigh_rate,
                                        const std::vector<double>& t_g);
  std::pair<double, double> rates_at(double t) const;
};

std::vector<std::string> diagnostics(const ScatteringTable& table);

struct ModelPoint {
  double t_g = 0.0;
  ErrorBudget budget;
};

// Per-channel model error against gate time.  The anchor config and noise
// describe the Table-1 point; at other t_g the loop count is kept, the
// light-shift amplitude scales with the drive (~ 1/t_g) and the scattering
// rates follow `table`.
std::vector<ModelPoint> model_curves(const NoiseParams& anchor_noise, const GateConfig& anchor_cfg,
                                     const ScatteringTable& table, const std::vector<double>& t_g,
                                     const AlphaTable& alphas = {});

// Labels of the `count` channels with the largest peak error over the curves.
std::vector<std::string> largest_channels(const std::vector<ModelPoint>& curves, std::size_t count);

// Bell error after the scattering detuning sweep at fixed t_g and constant
// Omega: rates ~ 1/|Delta| relative to the anchor, plus a constant offset.
std::vector<double> scattering_detuning_curve(const NoiseParams& anchor_noise, double anchor_t_g,
                                              double anchor_detuning, double t_g,
                                              const std::vector<double>& detunings, double offset);

// N eps_g + (pi^2/4) (N dOmega/Omega)^2.
double multi_gate_error(int n_gates, double per_gate_error, double drift_frac);
// Bell-type error of N phase gates on |++>, each over-rotated by (1+drift)^2
// and followed by two-qubit depolarisation of infidelity per_gate_error.
double multi_gate_error_simulated(int n_gates, double per_gate_error, double drift_frac);

struct QuadraticFit {
  double linear = 0.0;     // coefficient of N
  double quadratic = 0.0;  // coefficient of N^2
};
// Least-squares fit of error = a N + b N^2.
QuadraticFit fit_linear_quadratic(const std::vector<int>& n, const std::vector<double>& error);

// ---------------------------------------------------------------- oracles

struct OracleOptions {
  int fock_cutoff = 20;
  EvolveOptions evolve;
};

// Error of one continuous rectangular force pulse of length t_g with K loops
// acting on |++> (x) thermal(nbar_gate), relative to the noise-free output.
double direct_gate_error(double t_g, int loops, double eta, const NoiseParams& noise,
                         const OracleOptions& options = {});
// alpha_K from the slope of direct_gate_error against t_g / tau.
double alpha_coefficient(int loops, const OracleOptions& options = {});

// 1 - F of the full Bell sequence.
double sequence_error(const GateConfig& cfg, const NoiseParams& noise,
                      const SequenceOptions& options = {});

// Spectator mode: thermal average over Fock n of the sequence error with the
// drive reduced by L_n(eta^2) (Rabi set for n = 0).
double spectator_thermal_error_numeric(const GateConfig& calibrated_cfg, double eta_spec, double nbar);
// Gate mode: full Debye-Waller sideband operator, Rabi calibrated at nbar = 0,
// thermal gate mode.
double gate_mode_thermal_error_numeric(const GateConfig& calibrated_exact_cfg, double nbar);

}  // namespace iongate
