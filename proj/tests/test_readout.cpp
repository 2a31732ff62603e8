#include <cmath>
#include <limits>

#include "doctest.h"
#include "iongate/readout.hpp"

using namespace iongate;

namespace {

// Poisson tail P(X >= k), summed directly.
double poisson_at_least(double mean, int k) {
  double term = std::exp(-mean), cdf = 0.0;
  for (int j = 0; j < k; ++j) {
    cdf += term;
    term *= mean / (j + 1);
  }
  return 1.0 - cdf;
}

}  // namespace

TEST_CASE("shelf decay probability during detection") {
  const ReadoutModel m;
  CHECK(shelf_decay_probability(m) == doctest::Approx(1.0 - std::exp(-1.9 / 1168.0)));
  CHECK(shelf_decay_probability(m) == doctest::Approx(1.625e-3).epsilon(1e-3));
}

TEST_CASE("without decay the count distributions are Poisson") {
  ReadoutModel m;
  m.shelf_lifetime = std::numeric_limits<double>::infinity();
  m.thresholds = {20, 170};
  const double dark = 2 * m.dark_rate * m.detect_time;
  const auto p0 = class_probabilities(m, 0, false);
  CHECK(p0[1] + p0[2] == doctest::Approx(poisson_at_least(dark, 20)).epsilon(1e-6));
  const double one = (m.bright_rate + 2 * m.dark_rate) * m.detect_time;
  const auto p1 = class_probabilities(m, 1, false);
  CHECK(p1[0] == doctest::Approx(1.0 - poisson_at_least(one, 20)).epsilon(1e-6));
  CHECK(p1[2] == doctest::Approx(poisson_at_least(one, 170)).epsilon(1e-6));
}

TEST_CASE("class probabilities are normalised") {
  const ReadoutModel m;
  for (int k = 0; k < 3; ++k) {
    const auto p = class_probabilities(m, k);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("SPAM map columns and correction") {
  const auto map = build_spam_map(2e-3, 1.5e-3);
  const double ed = 2e-3, eu = 1.5e-3;
  // Column for |dd>: both ions must read dark.
  CHECK(map.m(0, 0) == doctest::Approx((1 - ed) * (1 - ed)));
  CHECK(map.m(2, 0) == doctest::Approx(ed * ed));
  // Column for one bright ion.
  CHECK(map.m(0, 1) == doctest::Approx((1 - ed) * eu));
  CHECK(map.m(2, 1) == doctest::Approx(ed * (1 - eu)));
  const Eigen::Vector3d truth(0.49, 0.02, 0.49);
  CHECK((correct_populations(map.m * truth, map) - truth).norm() < 1e-14);
  CHECK_THROWS_AS(correct_populations(Eigen::Vector3d(-0.1, 0.6, 0.5), map), CalibrationError);
}

TEST_CASE("prep error calibration reaches the measured SPAM level") {
  ReadoutModel m;
  m.thresholds = optimal_thresholds(m);
  m.prep_error = calibrate_prep_error(m, 1.74e-3);
  CHECK(spam_truth(m).eps_spam == doctest::Approx(1.74e-3).epsilon(1e-6));
}

TEST_CASE("SPAM estimate scatters around the truth") {
  ReadoutModel m;
  m.thresholds = optimal_thresholds(m);
  const double truth = spam_truth(m).eps_spam;
  const auto e = estimate_spam(m, 200000, 11);
  CHECK(std::abs(e.eps_spam - truth) < 4.0 * e.se_spam);
}

TEST_CASE("uncorrected readout inflates the Bell infidelity by about 3 eps_SPAM") {
  ReadoutModel m;
  m.thresholds = optimal_thresholds(m);
  m.prep_error = calibrate_prep_error(m, 1.74e-3);
  CHECK(uncorrected_inflation(m) == doctest::Approx(3 * 1.74e-3).epsilon(0.2));
}

TEST_CASE("shelf decay makes the corrected fidelity slightly pessimistic") {
  ReadoutModel m;
  m.thresholds = optimal_thresholds(m);
  const auto r = shelf_decay_bias_study(m);
  CHECK(r.bias > 0.0);
  CHECK(r.bias < 0.3e-3);
}

TEST_CASE("detection is reproducible and validates its model") {
  const ReadoutModel m;
  CHECK(simulate_detection(TwoIonClass::kFlip, m, 5).counts == simulate_detection(TwoIonClass::kFlip, m, 5).counts);
  ReadoutModel bad;
  bad.thresholds = {50, 10};
  CHECK_FALSE(diagnostics(bad).empty());
}
