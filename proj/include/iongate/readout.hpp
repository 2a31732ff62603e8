#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "iongate/core.hpp"
#include "iongate/io.hpp"

namespace iongate {

// Two-ion fluorescence readout.  |down> is shelved (dark), |up> fluoresces,
// so the ideal signal class (0, 1 or 2 ions bright) equals the number of
// up spins.
struct ReadoutModel {
  double bright_rate = 60.0;      // counts/ms per bright ion
  double dark_rate = 0.5;         // counts/ms per dark ion
  double detect_time = 1.9;       // ms
  double shelf_lifetime = 1168.0;  // ms (inf disables decay)
  std::array<int, 2> thresholds{20, 170};  // counts: n < t1 -> 0, t1 <= n < t2 -> 1, else 2
  double prep_error = 0.0;        // per-qubit preparation/shelving error probability
};

std::vector<std::string> diagnostics(const ReadoutModel& m);

// True two-ion state classes: 0 = dd, 1 = one flip (du or ud), 2 = uu.
enum class TwoIonClass { kDownDown = 0, kFlip = 1, kUpUp = 2 };

// 1 - exp(-detect_time / shelf_lifetime).
double shelf_decay_probability(const ReadoutModel& m);

struct Detection {
  int observed_class = 0;  // ions bright
  std::int64_t counts = 0;
};

Detection simulate_detection(TwoIonClass state, const ReadoutModel& m, std::mt19937_64& rng);
Detection simulate_detection(TwoIonClass state, const ReadoutModel& m, std::uint64_t seed);

// Exact probabilities of observing 0/1/2 bright for a state prepared with
// `n_up` up spins (prep errors included when with_prep is true).
std::array<double, 3> class_probabilities(const ReadoutModel& m, int n_up, bool with_prep = true);

// Thresholds minimising the summed misclassification of 0, 1 and 2 bright
// ions (no prep error), by exhaustive search over integer cut points.
std::array<int, 2> optimal_thresholds(const ReadoutModel& m, int max_count = 0);

struct SpamEstimate {
  double eps_down = 0.0;
  double eps_up = 0.0;
  double eps_spam = 0.0;
  double se_down = 0.0;
  double se_up = 0.0;
  double se_spam = 0.0;
};

// Per-qubit errors from dd and uu calibration shots, assuming independent
// identical qubits: eps = (wrong-ion count)/(2 N).
SpamEstimate estimate_spam(const ReadoutModel& m, std::int64_t shots_per_state, std::uint64_t seed);
// Expectation of estimate_spam (exact class probabilities).
SpamEstimate spam_truth(const ReadoutModel& m);
// prep_error giving eps_SPAM = target with the model's thresholds.
double calibrate_prep_error(const ReadoutModel& m, double target);

// Column-stochastic map from true classes {dd, flip, uu} to observed classes
// {0, 1, 2 bright}.
struct SpamMap {
  Eigen::Matrix3d m;
  double eps_down = 0.0;
  double eps_up = 0.0;
  double condition_number = 1.0;
};

SpamMap build_spam_map(double eps_down, double eps_up);
// Exact map of the readout model, including the shelf-decay asymmetry
// between the flip and aligned states.
SpamMap exact_spam_map(const ReadoutModel& m);
// M^{-1} observed, tiny negatives (> -1e-6) clamped and renormalised.
Eigen::Vector3d correct_populations(const Eigen::Vector3d& observed, const SpamMap& map);

struct BellReadout {
  double c = 0.0;
  double psum = 0.0;
  double fidelity() const { return 0.5 * (c + psum); }
};

// Contrast and P_dd + P_uu seen through `observe` for a Bell state with the
// given true values (parity at its extremes, populations split evenly).
BellReadout observe_bell(const BellReadout& truth, const Eigen::Matrix3d& observe);
// Same, after correction with `correction`.
BellReadout observe_and_correct(const BellReadout& truth, const Eigen::Matrix3d& observe,
                                const SpamMap& correction);

// Infidelity added by skipping SPAM correction (~ 3 eps_SPAM).
double uncorrected_inflation(const ReadoutModel& m, const BellReadout& truth = {1.0, 1.0});

struct ShelfBiasResult {
  double f_true = 0.0;
  double f_inferred = 0.0;
  double bias = 0.0;  // f_true - f_inferred: > 0 overestimates the gate error
};

// Gate-run emulation: readout through the exact map, correction with the map
// built from the dd/uu calibration (independent-qubit assumption).
ShelfBiasResult shelf_decay_bias_study(const ReadoutModel& m, const BellReadout& truth = {0.9953, 0.9997});

Json to_json(const ReadoutModel& m);
ReadoutModel readout_from_json(const Json& j);
Json to_json(const SpamEstimate& e);

}  // namespace iongate
