#include <cmath>

#include "doctest.h"
#include "iongate/budget.hpp"
#include "iongate/config.hpp"

using namespace iongate;

TEST_CASE("closed-form channels") {
  // Independent evaluations of the textbook expressions.
  const double eta = 0.094, nbar = 0.2;
  CHECK(thermal_error(eta, nbar) == doctest::Approx(kPi * kPi / 4 * std::pow(eta, 4) * nbar * (2 * nbar + 1)));
  CHECK(heating_error(2.2, 100e-6, 2) == doctest::Approx(2.2 * 100e-6 / 4));
  CHECK(heating_error(2.2, 100e-6, 2) == doctest::Approx(0.055e-3));
  CHECK(intensity_drift_error(5e-3) == doctest::Approx(kPi * kPi / 4 * 25e-6));
  CHECK(crosstalk_error(0.2e3, 36.5e3) == doctest::Approx(kPi * kPi / 4 * std::pow(0.2 / 36.5, 2)));
}

TEST_CASE("micromotion crosstalk lies in the quoted band") {
  const double e = crosstalk_error(0.2e3, 36.5e3);
  CHECK(e == doctest::Approx(7.4e-5).epsilon(0.01));
  CHECK(e < 0.2e-3);
}

TEST_CASE("motional dephasing: tabulated alpha and the 200 ms point") {
  const AlphaTable alphas;
  CHECK(alphas.at(1) == doctest::Approx(0.686).epsilon(0.005));
  CHECK(alphas.at(2) == doctest::Approx(0.297).epsilon(0.005));
  CHECK(alphas.at(4) == doctest::Approx(0.137).epsilon(0.005));
  CHECK(dephasing_error(0.2, 100e-6, 2) == doctest::Approx(0.15e-3).epsilon(0.02));
}

TEST_CASE("calibrations invert their formulas") {
  const double raman = calibrate_raman_rate(0.4e-3, 1.0, 100e-6);
  CHECK(scattering_error(raman, 1.0, 100e-6) == doctest::Approx(0.4e-3).epsilon(1e-9));
  const double beta = calibrate_spin_dephasing(0.2e-3, 100e-6);
  CHECK(spin_dephasing_error(beta, 100e-6) == doctest::Approx(0.2e-3).epsilon(1e-9));
}

TEST_CASE("Table-1 budget rows and total") {
  const auto cfg = builtin_profile("table1-100us");
  const auto b = budget_table(cfg.noise, cfg.gate);
  CHECK(b.at(kScattering) == doctest::Approx(0.4e-3).epsilon(0.125));
  CHECK(b.at(kMotional) == doctest::Approx(0.2e-3).epsilon(0.25));
  CHECK(b.at(kSpinDephasing) == doctest::Approx(0.2e-3).epsilon(0.25));
  CHECK(b.at(kIntensityDrift) < 0.06e-3 + 0.01e-3);
  CHECK(b.at(kThermal) < 0.04e-3);
  CHECK(b.at(kOffResonant) < 0.01e-3);
  double sum = 0.0;
  for (const auto& [k, v] : b.entries()) sum += v;
  CHECK(b.total() == doctest::Approx(sum));
  CHECK(b.total() == doctest::Approx(0.9e-3).epsilon(0.11));
}

TEST_CASE("constant-power scattering scales as 1/t_g^2") {
  const auto t = ScatteringTable::constant_power(100e-6, 2.0, 1.0, {10e-6, 100e-6, 400e-6});
  const auto [r10, y10] = t.rates_at(10e-6);
  const auto [r50, y50] = t.rates_at(50e-6);
  CHECK(r10 == doctest::Approx(200.0));
  CHECK(y10 == doctest::Approx(100.0));
  CHECK(r50 == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("model curves reproduce the budget at the anchor") {
  const auto cfg = builtin_profile("table1-100us");
  const auto table = ScatteringTable::constant_power(100e-6, cfg.noise.raman_rate, cfg.noise.rayleigh_deph_rate,
                                                     {3.8e-6, 520e-6});
  const auto curves = model_curves(cfg.noise, cfg.gate, table, {3.8e-6, 100e-6, 520e-6});
  CHECK(curves[1].budget.total() == doctest::Approx(budget_table(cfg.noise, cfg.gate).total()));
  // Scattering dominates fast gates, motional terms slow ones.
  CHECK(curves[0].budget.at(kScattering) > curves[1].budget.at(kScattering));
  CHECK(curves[2].budget.at(kMotional) > curves[1].budget.at(kMotional));
  CHECK(largest_channels(curves, 4).size() == 4);
}

TEST_CASE("linear plus quadratic fit recovers exact coefficients") {
  std::vector<int> n;
  std::vector<double> e;
  for (int k = 1; k <= 12; ++k) {
    n.push_back(k);
    e.push_back(multi_gate_error(k, 1.5e-3, 5e-3));
  }
  const auto fit = fit_linear_quadratic(n, e);
  CHECK(fit.linear == doctest::Approx(1.5e-3).epsilon(1e-9));
  CHECK(fit.quadratic == doctest::Approx(kPi * kPi / 4 * 25e-6).epsilon(1e-9));
}

TEST_CASE("simulated multi-gate error has the injected quadratic term") {
  std::vector<int> n;
  std::vector<double> e;
  for (int k = 1; k <= 20; ++k) {
    n.push_back(k);
    e.push_back(multi_gate_error_simulated(k, 1.5e-3, 5e-3));
  }
  const auto fit = fit_linear_quadratic(n, e);
  CHECK(fit.quadratic == doctest::Approx(kPi * kPi / 4 * 25e-6).epsilon(0.25));
  CHECK(fit.linear == doctest::Approx(1.5e-3).epsilon(0.1));
}

TEST_CASE("heating oracle matches the formula") {
  NoiseParams n;
  n.heating_rate = 50.0;
  OracleOptions o;
  o.fock_cutoff = 12;
  const double numeric = direct_gate_error(100e-6, 2, 0.123, n, o);
  CHECK(numeric == doctest::Approx(heating_error(50.0, 100e-6, 2)).epsilon(0.05));
}

TEST_CASE("formula inputs are validated") {
  CHECK_THROWS_AS(intensity_drift_error(0.2), Error);
  CHECK_THROWS_AS(crosstalk_error(0.2e3, 0.0), Error);
}
