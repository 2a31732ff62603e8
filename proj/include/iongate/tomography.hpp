#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "iongate/io.hpp"

namespace iongate {

struct ParityDataset {
  std::vector<double> phases;  // rad
  std::vector<std::int64_t> even_counts;
  std::vector<std::int64_t> total_shots;
};

std::vector<std::string> diagnostics(const ParityDataset& data);

// n uniformly spaced analysis phases over [0, 2 pi).
std::vector<double> uniform_phases(int n = 16);

// P_dd + P_uu - P_du - P_ud from {P_dd, P_du, P_ud, P_uu}.
double parity(const std::array<double, 4>& populations);

// Probability of an even outcome: (1 + C0 + C sin 2(phi - phi0)) / 2.
double fringe_probability(double c, double c0, double phi0, double phi);

ParityDataset synthesize_parity(double c, double c0, double phi0, const std::vector<double>& phases,
                                std::int64_t shots_per_point, std::uint64_t seed);

struct FitResult {
  double c = 0.0;
  double c0 = 0.0;
  double phi0 = 0.0;  // canonical, in [0, pi)
  double se_c = 0.0;
  double se_c0 = 0.0;
  double se_phi0 = 0.0;
  double log_likelihood = 0.0;
  double reduced_chi2 = 0.0;
  bool at_boundary = false;  // a probability constraint is active
  int iterations = 0;
};

double log_likelihood(const ParityDataset& data, double c, double c0, double phi0);

// Feasible set of the ML fit.  kDataPhases is the likelihood's own domain and
// keeps the estimator unbiased up to C ~ 0.999; kAllPhases additionally keeps
// the fitted fringe a probability between the measured phases but truncates
// the estimator near C = 1.
enum class MlConstraint {
  kDataPhases,  // 0 <= p <= 1 at the measured phases
  kAllPhases,   // |C0| + |C| <= 1
};

// Exact binomial maximum likelihood over (C, C0, phi0).  The model is linear
// in (C0, C cos 2phi0, -C sin 2phi0), so the log-likelihood is concave there
// and an interior-point Newton method finds the unique optimum without a
// phase scan.
FitResult fit_ml_binomial(const ParityDataset& data, MlConstraint constraint = MlConstraint::kDataPhases);

// Weighted least squares on the parity estimates 2k/N - 1 with variances
// taken from the observed frequencies (k + 1/2)/(N + 1); unconstrained.
FitResult fit_least_squares(const ParityDataset& data);

struct BiasStudyParams {
  double c = 0.995;
  double c0 = 0.0;
  double phi0 = 0.3;
  int n_phases = 16;
  std::int64_t shots = 1000;
  int n_datasets = 500;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  MlConstraint constraint = MlConstraint::kDataPhases;
};

struct BiasStudyResult {
  double ml_bias = 0.0;
  double ml_bias_se = 0.0;  // standard error of the ensemble mean
  double ls_bias = 0.0;
  double ls_bias_se = 0.0;
  std::vector<double> ml_c;
  std::vector<double> ls_c;
};

BiasStudyResult bias_study(const BiasStudyParams& params);

struct FidelityCorrection {
  std::string label;
  double value = 0.0;  // amount subtracted (se) or applied (spam)
};

struct FidelityResult {
  double f = 0.0;
  double c = 0.0;
  double psum = 0.0;
  double se_f = 0.0;
  double gate_error = 0.0;  // (1 - F) - eps_SE
  double se_gate_error = 0.0;
  std::vector<FidelityCorrection> corrections;
  bool nonphysical = false;  // gate_error < 0
};

struct FidelityInputs {
  double c = 0.0;
  double psum = 0.0;  // P_dd + P_uu, already SPAM-corrected if psum_raw is set
  double se_c = 0.0;
  double se_psum = 0.0;
  double eps_se = 0.0;
  double se_eps_se = 0.0;
  double psum_raw = -1.0;  // uncorrected P_dd + P_uu; negative = no SPAM correction applied
};

// F = (C + Psum)/2 and eps_g = (1 - F) - eps_SE with errors in quadrature.
FidelityResult bell_fidelity(const FidelityInputs& in);

// CSV columns phase_rad, even_counts, shots; JSON mirrors the columns.
Table to_table(const ParityDataset& data);
ParityDataset dataset_from_csv(const std::string& text);
Json dataset_to_json(const ParityDataset& data);
ParityDataset dataset_from_json(const Json& j);

}  // namespace iongate
