#include <cmath>

#include "doctest.h"
#include "iongate/rb.hpp"

using namespace iongate;

TEST_CASE("computational gates average about two pulses") {
  RbPlan p;
  p.sequence_lengths = {1000};
  p.n_sequences = 4;
  long pulses = 0, gates = 0;
  for (const auto& s : generate_sequences(p))
    for (const auto& g : s.gates) {
      pulses += physical_pulses(g);
      ++gates;
    }
  // Paulis X, Y cost two pulses, I and Z none, plus the pi/2: mean 1 + 1 = 2.
  CHECK(static_cast<double>(pulses) / gates == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("sequence generation is deterministic and seed dependent") {
  RbPlan p;
  p.sequence_lengths = {5, 10};
  p.n_sequences = 3;
  const auto a = generate_sequences(p);
  const auto b = generate_sequences(p);
  CHECK(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].gates.size() == b[i].gates.size());
    for (std::size_t k = 0; k < a[i].gates.size(); ++k) CHECK(a[i].gates[k].axis == b[i].gates[k].axis);
  }
  p.seed = 2;
  const auto c = generate_sequences(p);
  bool differs = false;
  for (std::size_t k = 0; k < a[5].gates.size(); ++k) differs |= a[5].gates[k].axis != c[5].gates[k].axis;
  CHECK(differs);
}

TEST_CASE("noise-free sequences return the expected pole") {
  RbPlan p;
  p.sequence_lengths = {1, 37, 200};
  p.n_sequences = 8;
  for (const auto& s : generate_sequences(p)) CHECK(sequence_survival(s, NoiseModel1Q{}, 0.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("depolarizing survival matches 1/2 + 1/2 (1 - 2 eps)^l") {
  NoiseModel1Q n;
  n.depolarizing_per_gate = 1e-3;
  RbPlan p;
  p.sequence_lengths = {1, 50, 400};
  p.n_sequences = 4;
  for (const auto& s : generate_sequences(p))
    CHECK(sequence_survival(s, n, 0.0, 0) == doctest::Approx(0.5 + 0.5 * std::pow(1 - 2e-3, s.length)).epsilon(1e-12));
}

TEST_CASE("fit recovers an injected error per gate") {
  NoiseModel1Q n;
  n.depolarizing_per_gate = 2e-4;
  const RbPlan p;
  const auto r = fit_decay(simulate_rb(p, n));
  CHECK(r.error_per_gate == doctest::Approx(2e-4).epsilon(0.2));
  CHECK(r.b_fixed);
  CHECK(r.se_error_per_gate > 0.0);
}

TEST_CASE("records round-trip through CSV") {
  RbPlan p;
  p.sequence_lengths = {1, 20};
  p.n_sequences = 2;
  p.shots = 50;
  NoiseModel1Q n;
  n.depolarizing_per_gate = 5e-3;
  const auto rec = simulate_rb(p, n);
  const auto back = rb_records_from_csv(to_table(rec).to_csv());
  REQUIRE(back.size() == rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) CHECK(back[i].successes == rec[i].successes);
}

TEST_CASE("parallel simulation equals serial simulation") {
  RbPlan p;
  p.sequence_lengths = {10, 100};
  p.n_sequences = 6;
  NoiseModel1Q n;
  n.phase_noise = PhaseNoiseKind::kOrnsteinUhlenbeck;
  n.phase_noise_amplitude = 0.01;
  const auto a = simulate_rb(p, n, 1);
  const auto b = simulate_rb(p, n, 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].successes == b[i].successes);
}

TEST_CASE("invalid plans and noise are reported") {
  RbPlan p;
  p.sequence_lengths = {};
  p.shots = 0;
  CHECK(diagnostics(p).size() >= 2);
  NoiseModel1Q n;
  n.depolarizing_per_gate = 0.7;
  CHECK_FALSE(diagnostics(n).empty());
}
