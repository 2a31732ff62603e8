#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "iongate/spin.hpp"
#include "iongate/spinecho.hpp"

using namespace iongate;

TEST_CASE("echo pulses are unitary rotations") {
  const SpinEchoConfig c;
  for (int k = 0; k < 3; ++k) {
    const CMat u = echo_pulse(c, k);
    CHECK((u * u.adjoint() - CMat::Identity(4, 4)).norm() < 1e-12);
  }
}

TEST_CASE("ideal pulses leave no error") {
  SpinEchoConfig c;
  c.delta_f = 0.0;
  for (const double t : {0.0, 50e-6, 100e-6, 333e-6}) CHECK(epsilon_se(c, t) < 1e-12);
}

TEST_CASE("error is even in the frequency difference") {
  SpinEchoConfig a, b;
  b.delta_f = -a.delta_f;
  for (const double t : {20e-6, 100e-6, 210e-6}) CHECK(epsilon_se(a, t) == doctest::Approx(epsilon_se(b, t)));
}

TEST_CASE("first maximum sits at 1/df") {
  const SpinEchoConfig c;
  const double t_peak = 1.0 / c.delta_f;
  const auto peak = first_maximum(c, 1e-6, 400e-6);
  CHECK(peak.t_g == doctest::Approx(t_peak).epsilon(0.10));
  CHECK(peak.error == doctest::Approx(1.8e-3).epsilon(0.10));
  // Back near zero a full period after the origin.
  CHECK(epsilon_se(c, 2.0 * t_peak) < 0.1 * peak.error);
}

TEST_CASE("sweep agrees with pointwise evaluation") {
  const SpinEchoConfig c;
  const std::vector<double> t{10e-6, 90e-6, 170e-6};
  const auto e = simulate_epsilon_se(c, t);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(e[i] == doctest::Approx(epsilon_se(c, t[i])));
}
