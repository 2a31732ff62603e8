#include <string>

#include "doctest.h"
#include "iongate/budget.hpp"
#include "iongate/config.hpp"

using namespace iongate;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.diagnostics();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& what) {
  for (const auto& e : errors)
    if (e.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("built-in profiles exist, validate and round-trip") {
  const auto all = builtin_profiles();
  for (const char* name : {"table1-100us", "fast-gate-3.8us", "rbm-paper"}) {
    REQUIRE(all.count(name));
    const auto& c = all.at(name);
    CHECK(validate(c).empty());
    const std::string text = to_ini(c);
    CHECK(to_ini(parse_config(text)) == text);
    CHECK(config_hash(parse_config(text)) == config_hash(c));
  }
}

TEST_CASE("table1 profile carries the paper's operating point") {
  const auto c = builtin_profile("table1-100us");
  CHECK(c.noise.nbar_gate == 0.02);
  CHECK(c.noise.heating_rate == 2.2);
  CHECK(c.noise.motional_tau == 0.2);
  CHECK(c.gate.gate_time() == doctest::Approx(100e-6));
  CHECK(c.gate.loops == 2);
  CHECK(budget_table(c.noise, c.gate).total() == doctest::Approx(0.9e-3).epsilon(0.11));
}

TEST_CASE("every profile parameter carries a provenance tag") {
  for (const auto& [name, c] : builtin_profiles())
    for (const auto& key : config_keys()) {
      if (key.rfind("meta.", 0) == 0) continue;
      CAPTURE(key);
      CHECK(c.provenance.count(key) == 1);
    }
}

TEST_CASE("strict parsing") {
  CHECK(mentions(errors_of("[noise]\nbogus = 1\n"), "noise.bogus"));
  CHECK(mentions(errors_of("[nonsense]\na = 1\n"), "nonsense"));
  CHECK(mentions(errors_of("[noise]\nheating_rate = -1\n"), "noise.heating_rate"));
  CHECK(mentions(errors_of("[gate]\ndelta_g = fast\n"), "gate.delta_g"));
  CHECK(mentions(errors_of("[readout]\nthreshold_1 = 2.5\n"), "readout.threshold_1"));
  CHECK(mentions(errors_of("[provenance]\nnoise.heating_rate = guessed: hmm\n"), "provenance"));
  // Several problems are reported together.
  CHECK(errors_of("[noise]\nheating_rate = -1\nbogus = 2\n[x]\na = 1\n").size() >= 3);
}

TEST_CASE("calibrated parameters require a calibration note") {
  auto c = builtin_profile("table1-100us");
  c.provenance.erase("noise.raman_rate");
  CHECK(mentions(validate(c), "noise.raman_rate"));
}

TEST_CASE("hash tracks content") {
  auto c = builtin_profile("table1-100us");
  const auto h = config_hash(c);
  CHECK(h.size() == 16);
  c.noise.heating_rate = 2.3;
  CHECK(config_hash(c) != h);
}

TEST_CASE("partial files start from defaults") {
  const auto c = parse_config("[noise]\nheating_rate = 5\n[rb]\nsequence_lengths = 1, 10, 100\n");
  CHECK(c.noise.heating_rate == 5.0);
  CHECK(c.rb.sequence_lengths == std::vector<int>{1, 10, 100});
  CHECK(c.gate.loops == GateConfig{}.loops);
}
