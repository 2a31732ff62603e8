#include <cmath>

#include "doctest.h"
#include "iongate/qdyn.hpp"
#include "iongate/spin.hpp"

using namespace iongate;

namespace {

QuantumState qubit_up_down(double up) {
  const HilbertSpec spec{1, 0, {}};
  CVec psi(2);
  psi << std::sqrt(1.0 - up), std::sqrt(up);
  return pure_state(spec, psi);
}

}  // namespace

TEST_CASE("thermal mode has unit trace and the requested occupation") {
  for (const double nbar : {0.0, 0.02, 0.5, 1.0}) {
    const CMat rho = thermal_mode(60, nbar);
    double n = 0.0;
    for (int k = 0; k <= 60; ++k) n += k * rho(k, k).real();
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n == doctest::Approx(nbar).epsilon(1e-9));
  }
}

TEST_CASE("resonant Rabi flopping follows sin^2") {
  const OperatorSet ops(HilbertSpec{1, 0, {}});
  const double rabi = kTwoPi * 50e3;
  TimeDependentOperator h(ops.dimension());
  h.add_constant(Operator(0.5 * rabi * ops.sigma_x(0)));
  const auto init = qubit_up_down(0.0);
  const std::vector<double> t{1e-6, 3e-6, 7e-6, 10e-6};
  const auto states = evolve(init, h, {}, t.back(), {}, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double expected = std::pow(std::sin(0.5 * rabi * t[i]), 2);
    CHECK(states[i].rho(1, 1).real() == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("amplitude damping empties the mode exponentially") {
  const HilbertSpec spec{1, 24, {"mode"}};
  const OperatorSet ops(spec);
  const double gamma = 1e3;
  CVec down(2);
  down << 1.0, 0.0;
  const auto init = product_state(spec, down, {thermal_mode(24, 0.3)});
  const double n0 = expectation(init, ops.number()).real();
  TimeDependentOperator h(ops.dimension());
  const auto out = evolve_final(init, h, {{Operator(std::sqrt(gamma) * ops.annihilation()), "damping"}}, 1e-3);
  CHECK(expectation(out, ops.number()).real() == doctest::Approx(n0 * std::exp(-1.0)).epsilon(1e-7));
}

TEST_CASE("sigma_z collapse operator dephases at rate 2 gamma") {
  const OperatorSet ops(HilbertSpec{1, 0, {}});
  const double gamma = 300.0;
  const auto init = qubit_up_down(0.5);
  TimeDependentOperator h(ops.dimension());
  const double t = 1e-3;
  const auto out = evolve_final(init, h, {{Operator(std::sqrt(gamma) * ops.sigma_z(0)), "dephasing"}}, t);
  CHECK(std::abs(out.rho(0, 1)) == doctest::Approx(0.5 * std::exp(-2.0 * gamma * t)).epsilon(1e-8));
  CHECK(out.rho(1, 1).real() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("partial trace of a product state recovers the factors") {
  const HilbertSpec spec{2, 3, {"mode"}};
  const CVec ket = two_spin_ket(1, 0);
  const CMat mode = thermal_mode(3, 0.4);
  const auto s = product_state(spec, ket, {mode});
  CHECK((partial_trace(s, {2}).rho - mode).norm() < 1e-14);
  const CMat spins = partial_trace(s, {0, 1}).rho;
  CHECK(spins(2, 2).real() == doctest::Approx(1.0));
}

TEST_CASE("diagnostics flag non-physical states") {
  QuantumState s = qubit_up_down(0.3);
  CHECK(diagnose(s).within(StateTolerances{}));
  s.rho(0, 1) += 1e-6;
  CHECK_FALSE(diagnose(s).within(StateTolerances{}));
  s = qubit_up_down(0.3);
  s.rho(0, 0) += 1e-6;
  CHECK(diagnose(s).trace_error == doctest::Approx(1e-6));
}

TEST_CASE("strong displacement in a small Fock space is rejected") {
  const HilbertSpec spec{1, 6, {"mode"}};
  const OperatorSet ops(spec);
  CVec down(2);
  down << 1.0, 0.0;
  const auto init = product_state(spec, down, {thermal_mode(6, 0.0)});
  TimeDependentOperator h(ops.dimension());
  h.add_constant(Operator(1e6 * (ops.annihilation() + ops.creation())));
  CHECK_THROWS_AS(evolve_final(init, h, {}, 5e-6), TruncationError);
}

TEST_CASE("von Neumann entropy of a maximally mixed qubit is ln 2") {
  CHECK(entropy(0.5 * CMat::Identity(2, 2)) == doctest::Approx(std::log(2.0)));
  CHECK(entropy(qubit_up_down(1.0).rho) == doctest::Approx(0.0));
}
