#include <cmath>

#include "doctest.h"
#include "iongate/budget.hpp"
#include "iongate/gate.hpp"
#include "iongate/spin.hpp"

using namespace iongate;

namespace {

const GateConfig& table1_gate() {
  static const GateConfig c = calibrated(GateConfig{});
  return c;
}

}  // namespace

TEST_CASE("pulse envelopes") {
  const PulseShape rect{ShapeKind::kRectangular, 1.5e-6};
  const PulseShape smooth{ShapeKind::kSmoothRamp, 1.5e-6};
  CHECK(rect.envelope(0.0, 50e-6) == 1.0);
  CHECK(smooth.envelope(0.0, 50e-6) == doctest::Approx(0.0));
  CHECK(smooth.envelope(smooth.ramp_duration(), 50e-6) == doctest::Approx(1.0));
  CHECK(smooth.envelope(25e-6, 50e-6) == 1.0);
  CHECK(smooth.ramp_duration() == doctest::Approx(kPi * 1.5e-6 / 2.0));
}

TEST_CASE("gate detuning follows K / t_g") {
  const GateConfig c = GateConfig::for_gate_time(100e-6);
  CHECK(c.delta_g == doctest::Approx(2e4));
  CHECK(c.gate_time() == doctest::Approx(100e-6));
}

TEST_CASE("aligned spins feel no force and the Hamiltonian is Hermitian") {
  GateConfig c;
  c.rabi = 1e6;
  const HilbertSpec spec{2, 5, {"com"}};
  const OperatorSet ops(spec);
  const auto h = force_hamiltonian(c, ops, PulseWindow{0.0, c.gate_time()});
  for (const double t : {3e-6, 17e-6, 41e-6}) {
    const CMat m = CMat(h.at(t));
    CHECK((m - m.adjoint()).norm() < 1e-9 * m.norm());
    for (const int s : {0, 3}) {
      CVec psi = CVec::Zero(ops.dimension());
      psi(s * 6 + 2) = 1.0;  // Fock 2
      CHECK((m * psi).norm() < 1e-12 * m.norm());
    }
  }
}

TEST_CASE("analytic Rabi frequency gives a pi/2 differential phase") {
  for (const auto shape : {ShapeKind::kRectangular, ShapeKind::kSmoothRamp}) {
    GateConfig c;
    c.shape = shape;
    const double rabi = analytic_rabi(c);
    CHECK(geometric_phase(c, rabi, c.gate_time()) == doctest::Approx(kPi / 2).epsilon(1e-10));
  }
}

TEST_CASE("rectangular loops close: displacement returns to zero") {
  // Oracle: |alpha(t)| = (F/omega) |e^{i omega t} - 1| for a constant force F.
  GateConfig c;
  c.shape = ShapeKind::kRectangular;
  const double rabi = analytic_rabi(c);
  const double f = c.eta_gate * rabi / 2.0 * 2.0;
  CHECK(max_displacement(c, rabi, c.gate_time()) == doctest::Approx(2.0 * f / c.omega()).epsilon(1e-3));
}

TEST_CASE("noise-free calibrated sequence produces the Bell state") {
  const GateConfig& c = table1_gate();
  const auto out = run_bell_sequence(c, NoiseParams{});
  CHECK(out.bell_fidelity >= 1.0 - 1e-9);
  CHECK(out.populations[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(out.populations[2] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(out.populations[1] < 1e-8);
}

TEST_CASE("population dynamics match the coherent-state solution") {
  const GateConfig& c = table1_gate();
  std::vector<double> grid;
  for (int i = 0; i <= 6; ++i) grid.push_back(c.gate_time() * i / 6.0);
  const auto num = population_dynamics(c, grid);
  const auto ana = population_dynamics_analytic(c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(num[i].p_dd == doctest::Approx(ana[i].p_dd).epsilon(1e-6));
    CHECK(num[i].p_flip == doctest::Approx(ana[i].p_flip).epsilon(1e-6));
    CHECK(num[i].p_dd + num[i].p_flip + num[i].p_uu == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("carrier light shift: shaping suppresses the error") {
  GateConfig c;
  c.lightshift_amp = calibrate_lightshift(c, 4e-3, 16);
  const auto rect = carrier_lightshift_error_quadrature(c, PulseShape{ShapeKind::kRectangular, c.ramp_time});
  const auto smooth = carrier_lightshift_error_quadrature(c, c.pulse_shape());
  CHECK(rect.average == doctest::Approx(4e-3).epsilon(1e-6));
  CHECK(smooth.average < 0.01e-3);
  const auto me = carrier_lightshift_error(c, PulseShape{ShapeKind::kRectangular, c.ramp_time}, 4);
  const auto quad = carrier_lightshift_error_quadrature(c, PulseShape{ShapeKind::kRectangular, c.ramp_time}, 4);
  CHECK(me.average == doctest::Approx(quad.average).epsilon(1e-4));
}

TEST_CASE("invalid gate configurations are reported") {
  GateConfig c;
  c.delta_g = -1.0;
  c.loops = 0;
  CHECK(diagnostics(c).size() >= 2);
  CHECK_THROWS_AS(shape_kind_from_string("triangle"), Error);
}
