#include <cmath>

#include "doctest.h"
#include "iongate/core.hpp"
#include "iongate/tomography.hpp"

using namespace iongate;

TEST_CASE("fringe model and parity") {
  // p(phi) = (1 + C0 + C sin 2(phi - phi0)) / 2
  CHECK(fringe_probability(1.0, 0.0, 0.0, kPi / 4) == doctest::Approx(1.0));
  CHECK(fringe_probability(1.0, 0.0, 0.0, -kPi / 4) == doctest::Approx(0.0));
  CHECK(fringe_probability(0.8, 0.1, 0.3, 1.1) == doctest::Approx(0.5 * (1 + 0.1 + 0.8 * std::sin(2 * (1.1 - 0.3)))));
  CHECK(parity({0.4, 0.1, 0.1, 0.4}) == doctest::Approx(0.6));
  const auto p = uniform_phases(16);
  CHECK(p.size() == 16);
  CHECK(p[1] - p[0] == doctest::Approx(kTwoPi / 16));
}

TEST_CASE("synthetic data are reproducible from the seed") {
  const auto a = synthesize_parity(0.99, 0.0, 0.3, uniform_phases(16), 1000, 42);
  const auto b = synthesize_parity(0.99, 0.0, 0.3, uniform_phases(16), 1000, 42);
  const auto c = synthesize_parity(0.99, 0.0, 0.3, uniform_phases(16), 1000, 43);
  CHECK(a.even_counts == b.even_counts);
  CHECK(a.even_counts != c.even_counts);
}

TEST_CASE("ML fit recovers parameters and keeps phi0 in [0, pi)") {
  const auto d = synthesize_parity(0.95, 0.02, 2.9, uniform_phases(16), 20000, 7);
  const auto f = fit_ml_binomial(d);
  CHECK(f.c == doctest::Approx(0.95).epsilon(0.01));
  CHECK(f.phi0 >= 0.0);
  CHECK(f.phi0 < kPi);
  CHECK(std::abs(std::remainder(f.phi0 - 2.9, kPi)) < 0.01);
  CHECK(f.log_likelihood >= log_likelihood(d, 0.95, 0.02, 2.9));
}

TEST_CASE("least squares overestimates a high contrast, ML does not") {
  BiasStudyParams p;
  p.n_datasets = 500;
  const auto r = bias_study(p);
  CHECK(std::abs(r.ml_bias) < 3.0 * r.ml_bias_se);
  CHECK(r.ls_bias > 0.3e-3);
  CHECK(r.ls_bias < 1.7e-3);
}

TEST_CASE("Bell fidelity composition") {
  FidelityInputs in;
  in.c = 0.9953;
  in.psum = 0.9997;
  in.eps_se = 1.4e-3;
  const auto f = bell_fidelity(in);
  CHECK(f.f == doctest::Approx(0.9975).epsilon(1e-12));
  CHECK(f.gate_error == doctest::Approx(1.1e-3).epsilon(1e-9));
  CHECK_FALSE(f.nonphysical);
  in.eps_se = 3e-3;
  CHECK(bell_fidelity(in).nonphysical);
}

TEST_CASE("datasets round-trip through CSV and JSON") {
  const auto d = synthesize_parity(0.9, 0.0, 0.5, uniform_phases(8), 100, 3);
  const auto csv = dataset_from_csv(to_table(d).to_csv());
  CHECK(csv.even_counts == d.even_counts);
  CHECK(csv.phases == d.phases);
  const auto js = dataset_from_json(dataset_to_json(d));
  CHECK(js.total_shots == d.total_shots);
}

TEST_CASE("malformed datasets are rejected") {
  ParityDataset d;
  d.phases = {0.0, 1.0};
  d.even_counts = {5, 11};
  d.total_shots = {10, 10};
  CHECK_FALSE(diagnostics(d).empty());
}
