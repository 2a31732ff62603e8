// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "iongate/budget.hpp"
#include "iongate/config.hpp"
#include "iongate/gate.hpp"
#include "iongate/rb.hpp"
#include "iongate/readout.hpp"
#include "iongate/spinecho.hpp"
#include "iongate/tomography.hpp"

using namespace iongate;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool within(double value, double target, double rel) { return std::abs(value / target - 1.0) <= rel; }

// Agreement to +-1 in the last quoted digit.
bool last_digit(double value, double quoted, double digit) { return std::abs(value - quoted) <= digit + 1e-15; }

const GateConfig& table1_gate() {
  static const GateConfig c = calibrated(GateConfig{});
  return c;
}

Verdict alpha_coefficients() {
  Verdict v;
  const OracleOptions opt;  // Fock cutoff 20
  v.require(opt.fock_cutoff >= 20, "cutoff " + std::to_string(opt.fock_cutoff));
  const std::vector<std::pair<int, double>> quoted{{1, 0.686}, {2, 0.297}, {4, 0.137}};
  for (const auto& [k, a] : quoted) {
    const double got = alpha_coefficient(k, opt);
    v.require(within(got, a, 0.02), fmt("alpha_%.0f %.4f vs %.3f", k, got, a));
  }
  return v;
}

Verdict heating() {
  Verdict v;
  const double t_g = 100e-6;
  double worst = 0.0;
  for (const int k : {1, 2, 4})
    for (const double eps : {1e-5, 1e-4, 1e-3, 1e-2}) {
      NoiseParams n;
      n.heating_rate = 2.0 * k * eps / t_g;
      const double numeric = direct_gate_error(t_g, k, GateConfig{}.eta_gate, n);
      worst = std::max(worst, std::abs(numeric / heating_error(n.heating_rate, t_g, k) - 1.0));
    }
  v.require(worst <= 0.05, fmt("max deviation from ndot t_g/(2K) %.2f%% over K = 1, 2, 4 and eps 1e-5..1e-2", 100 * worst));
  NoiseParams n;
  n.heating_rate = 2.2;
  const double table = sequence_error(table1_gate(), n);
  v.require(last_digit(table, 0.06e-3, 0.01e-3), fmt("Table-1 point %.4fe-3 vs 0.06e-3", table * 1e3));
  return v;
}

Verdict motional_dephasing() {
  Verdict v;
  const double analytic = dephasing_error(0.2, 100e-6, 2);
  v.require(std::round(analytic * 1e5) == 15.0, fmt("analytic %.4fe-3 rounds to 0.15e-3", analytic * 1e3));
  NoiseParams n;
  n.motional_tau = 0.2;
  const double numeric = sequence_error(table1_gate(), n);
  v.require(within(numeric, 0.15e-3, 0.15), fmt("numeric %.4fe-3 vs 0.15e-3 +-15%%", numeric * 1e3));
  return v;
}

Verdict thermal() {
  Verdict v;
  double worst = 0.0;
  for (const double nbar : {0.05, 0.2, 0.5, 1.0}) {
    const double numeric = spectator_thermal_error_numeric(table1_gate(), 0.094, nbar);
    worst = std::max(worst, std::abs(numeric / thermal_error(0.094, nbar) - 1.0));
  }
  v.require(worst <= 0.10, fmt("spectator eta 0.094: max deviation %.2f%% (tol 10%%)", 100 * worst));
  // Gate mode with the full Debye-Waller operator, Rabi set assuming nbar = 0.
  GateConfig g;
  g.eta_gate = 0.12;
  g.lamb_dicke_exact = true;
  CalibrationOptions co;
  co.fidelity_target = 1.0 - 1e-5;
  g = calibrated(g, co);
  worst = 0.0;
  for (const double nbar : {0.05, 0.2, 0.5}) {
    const double numeric = gate_mode_thermal_error_numeric(g, nbar);
    worst = std::max(worst, std::abs(numeric / thermal_error(0.12, nbar) - 1.0));
  }
  v.require(worst <= 0.20, fmt("gate mode eta 0.12, nbar < 1: max deviation %.2f%% (tol 20%%)", 100 * worst));
  return v;
}

Verdict table1_budget() {
  Verdict v;
  const auto cfg = builtin_profile("table1-100us");
  const auto b = budget_table(cfg.noise, cfg.gate);
  const double d = 0.01e-3;
  v.require(last_digit(b.at(kScattering), 0.4e-3, 0.1e-3), fmt("scattering %.3fe-3", b.at(kScattering) * 1e3));
  v.require(last_digit(b.at(kMotional), 0.2e-3, 0.1e-3), fmt("motional %.3fe-3", b.at(kMotional) * 1e3));
  v.require(last_digit(b.at(kSpinDephasing), 0.2e-3, 0.1e-3), fmt("spin dephasing %.3fe-3", b.at(kSpinDephasing) * 1e3));
  v.require(b.at(kIntensityDrift) < 0.06e-3 + d, fmt("drift %.4fe-3 < 0.06e-3", b.at(kIntensityDrift) * 1e3));
  v.require(b.at(kThermal) < 0.04e-3 + d, fmt("thermal %.4fe-3 < 0.04e-3", b.at(kThermal) * 1e3));
  v.require(b.at(kOffResonant) < 0.01e-3 + d, fmt("off-resonant %.2g < 0.01e-3", b.at(kOffResonant)));
  v.require(last_digit(b.total(), 0.9e-3, 0.1e-3), fmt("total %.3fe-3 vs 0.9e-3", b.total() * 1e3));
  return v;
}

Verdict spin_echo() {
  Verdict v;
  const SpinEchoConfig c;
  const double t_peak = 1.0 / c.delta_f;
  const auto peak = first_maximum(c, 1e-6, 400e-6);
  v.require(within(peak.error, 1.8e-3, 0.10), fmt("first maximum %.3fe-3 vs 1.8e-3 +-10%%", peak.error * 1e3));
  v.require(within(peak.t_g, t_peak, 0.10), fmt("at %.1f us vs 1/df = %.1f us", peak.t_g * 1e6, t_peak * 1e6));
  const double at100 = epsilon_se(c, 100e-6);
  v.require(within(at100, 1.4e-3, 0.15), fmt("eps_SE(100 us) %.3fe-3 vs 1.4e-3 +-15%%", at100 * 1e3));
  return v;
}

Verdict gate_dynamics() {
  Verdict v;
  const GateConfig& c = table1_gate();
  const auto out = run_bell_sequence(c, NoiseParams{});
  v.require(out.bell_fidelity >= 1.0 - 1e-9, fmt("noise-free 1 - F = %.2e", 1.0 - out.bell_fidelity));
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(c.gate_time() * i / 49.0);
  const auto num = population_dynamics(c, grid);
  const auto ana = population_dynamics_analytic(c, grid);
  const auto& end = num.back();
  v.require(std::abs(end.p_dd - 0.5) <= 1e-8 && std::abs(end.p_uu - 0.5) <= 1e-8,
            fmt("at t_R = t_g P_dd - 1/2 = %.1e, P_uu - 1/2 = %.1e", end.p_dd - 0.5, end.p_uu - 0.5));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max({worst, std::abs(num[i].p_dd - ana[i].p_dd), std::abs(num[i].p_flip - ana[i].p_flip),
                      std::abs(num[i].p_uu - ana[i].p_uu)});
  v.require(worst <= 1e-6, fmt("analytic vs numeric on 50 points %.1e", worst));
  return v;
}

Verdict fitting_bias() {
  Verdict v;
  BiasStudyParams p;
  p.c = 0.995;
  p.n_phases = 16;
  p.shots = 1000;
  p.n_datasets = 500;
  const auto r = bias_study(p);
  v.require(std::abs(r.ml_bias) < 2.0 * r.ml_bias_se, fmt("ML bias %.2e +- %.2e", r.ml_bias, r.ml_bias_se));
  v.require(r.ls_bias >= 0.3e-3 && r.ls_bias <= 1.7e-3, fmt("LS bias %.3fe-3 in [0.3, 1.7]e-3", r.ls_bias * 1e3));
  return v;
}

Verdict fidelity_composition() {
  Verdict v;
  FidelityInputs in;
  in.c = 0.9953;
  in.psum = 0.9997;
  in.eps_se = 1.4e-3;
  const auto f = bell_fidelity(in);
  v.require(std::abs(f.f - 0.9975) < 1e-12, fmt("F = %.6f", f.f));
  v.require(std::abs(1.0 - f.f - 2.5e-3) < 1e-12, fmt("1 - F = %.4fe-3", (1.0 - f.f) * 1e3));
  v.require(std::abs(f.gate_error - 1.1e-3) < 1e-12, fmt("eps_g = %.4fe-3", f.gate_error * 1e3));
  return v;
}

Verdict crosstalk() {
  Verdict v;
  const double e = crosstalk_error(0.2e3, 36.5e3);
  v.require(last_digit(e, 7.4e-5, 0.1e-5), fmt("%.3fe-5 vs 7.4e-5", e * 1e5));
  v.require(e >= 0.0 && e <= 0.2e-3, "inside 0.1(1)e-3");
  return v;
}

Verdict multigate() {
  Verdict v;
  const double per_gate = 1.5e-3, drift = 5e-3;
  std::vector<int> n;
  std::vector<double> e;
  for (int k = 1; k <= 20; ++k) {
    n.push_back(k);
    e.push_back(multi_gate_error_simulated(k, per_gate, drift));
  }
  const auto fit = fit_linear_quadratic(n, e);
  const double predicted = kPi * kPi / 4.0 * drift * drift;
  v.require(within(fit.quadratic, predicted, 0.25),
            fmt("quadratic %.3e vs (pi^2/4) dOmega^2 = %.3e", fit.quadratic, predicted));
  v.require(within(fit.linear, per_gate, 0.25), fmt("linear %.3e vs %.1e per gate", fit.linear, per_gate));
  // Model prediction for the 30 us gate, informational.
  const auto cfg = builtin_profile("table1-100us");
  const auto table = ScatteringTable::constant_power(cfg.gate.gate_time(), cfg.noise.raman_rate,
                                                     cfg.noise.rayleigh_deph_rate, {3.8e-6, 520e-6});
  const double model30 = model_curves(cfg.noise, cfg.gate, table, {30e-6}).front().budget.total();
  v.detail += fmt("; model error at 30 us %.2fe-3", model30 * 1e3);
  return v;
}

Verdict randomized_benchmarking() {
  Verdict v;
  RbPlan plan;
  NoiseModel1Q n;
  n.depolarizing_per_gate = 2e-4;
  const auto rec = fit_decay(simulate_rb(plan, n));
  const std::string scale = std::to_string(plan.n_sequences) + " sequences x " +
                            std::to_string(plan.sequence_lengths.size()) + " lengths x " + std::to_string(plan.shots) +
                            " shots";
  v.require(within(rec.error_per_gate, 2e-4, 0.20), scale + fmt(": recovered %.3e vs 2e-4", rec.error_per_gate));
  n.depolarizing_per_gate = 0.066e-3;
  const auto small = fit_decay(simulate_rb(plan, n));
  const double ratio = small.se_error_per_gate / 0.003e-3;
  v.require(ratio >= 0.5 && ratio <= 2.0, fmt("se at 0.066e-3: %.2fe-6 vs 3e-6", small.se_error_per_gate * 1e6));
  return v;
}

Verdict readout() {
  Verdict v;
  ReadoutModel m;
  const double p = shelf_decay_probability(m);
  v.require(last_digit(p, 1.625e-3, 0.001e-3), fmt("shelf decay %.4fe-3 vs 1.625e-3", p * 1e3));
  m.thresholds = optimal_thresholds(m);
  m.prep_error = calibrate_prep_error(m, 1.74e-3);
  const double truth = spam_truth(m).eps_spam;
  const int replicas = 100;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const double e = estimate_spam(m, 80000, derive_seed(13, r)).eps_spam;
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / replicas;
  const double se = std::sqrt((sum2 / replicas - mean * mean) / (replicas - 1));
  v.require(std::abs(mean - truth) < 2.0 * se,
            fmt("SPAM ensemble mean %.4fe-3 vs truth %.4fe-3 (se %.4fe-3)", mean * 1e3, truth * 1e3, se * 1e3));
  const double inflation = uncorrected_inflation(m);
  v.require(within(inflation, 3.0 * truth, 0.20), fmt("uncorrected inflation %.2fe-3 vs 3 eps_SPAM = %.2fe-3",
                                                      inflation * 1e3, 3.0 * truth * 1e3));
  const auto bias = shelf_decay_bias_study(m);
  v.require(bias.bias >= 0.03e-3 && bias.bias <= 0.3e-3, fmt("shelf-decay bias %+.3fe-3 in [0.03, 0.3]e-3", bias.bias * 1e3));
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"alpha_K reproduction", alpha_coefficients},
      {"heating formula", heating},
      {"motional dephasing", motional_dephasing},
      {"thermal error", thermal},
      {"Table-1 budget", table1_budget},
      {"spin-echo error", spin_echo},
      {"gate dynamics", gate_dynamics},
      {"fitting bias", fitting_bias},
      {"fidelity composition", fidelity_composition},
      {"crosstalk", crosstalk},
      {"multi-gate scaling", multigate},
      {"RB recovery", randomized_benchmarking},
      {"readout", readout},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("%s %2zu %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures ? 1 : 0;
}
