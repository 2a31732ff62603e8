#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "iongate/core.hpp"
#include "iongate/ode.hpp"

namespace iongate {

inline constexpr std::size_t kDefaultMaxDimension = 4096;

// Subsystem order: spins first (most significant), then modes.
struct HilbertSpec {
  int n_spins = 2;
  int fock_cutoff = 0;  // highest Fock level N; 0 means no motional mode
  std::vector<std::string> mode_labels;

  int n_modes() const;
  int n_subsystems() const { return n_spins + n_modes(); }
  std::size_t subsystem_dimension(int index) const;
  std::size_t spin_dimension() const;
  std::size_t mode_dimension() const;
  std::size_t dimension() const;
};

void validate(const HilbertSpec& spec);
bool operator==(const HilbertSpec& a, const HilbertSpec& b);

class OperatorSet {
 public:
  explicit OperatorSet(HilbertSpec spec, std::size_t max_dimension = kDefaultMaxDimension);

  const HilbertSpec& spec() const { return spec_; }
  std::size_t dimension() const { return dim_; }
  const Operator& identity() const { return identity_; }

  const Operator& sigma_x(int spin) const { return sx_.at(spin); }
  const Operator& sigma_y(int spin) const { return sy_.at(spin); }
  const Operator& sigma_z(int spin) const { return sz_.at(spin); }
  const Operator& sigma_plus(int spin) const { return sp_.at(spin); }
  const Operator& sigma_minus(int spin) const { return sm_.at(spin); }
  const Operator& annihilation(int mode = 0) const { return a_.at(mode); }
  const Operator& creation(int mode = 0) const { return ad_.at(mode); }
  const Operator& number(int mode = 0) const { return n_.at(mode); }

  // Embeds a local operator acting on one subsystem into the full space.
  Operator embed(const CMat& local, int subsystem) const;
  // Embeds an operator on the spin register (2^n_spins square) into the full space.
  Operator embed_spins(const CMat& spin_op) const;

 private:
  HilbertSpec spec_;
  std::size_t dim_;
  Operator identity_;
  std::vector<Operator> sx_, sy_, sz_, sp_, sm_, a_, ad_, n_;
};

OperatorSet build_operators(const HilbertSpec& spec,
                            std::size_t max_dimension = kDefaultMaxDimension);

struct QuantumState {
  HilbertSpec spec;
  CMat rho;
  double time = 0.0;
};

struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-9;
  double min_eigenvalue = -1e-8;
};

struct StateDiagnostics {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool within(const StateTolerances& tol, double factor = 1.0) const;
};

StateDiagnostics diagnose(const QuantumState& state);
double purity(const QuantumState& state);

// Single-oscillator thermal density matrix on levels 0..cutoff, trace 1.
CMat thermal_mode(int cutoff, double nbar);
// Pure density matrix from a ket.
QuantumState pure_state(const HilbertSpec& spec, const CVec& psi);
// Spin ket (2^n_spins) tensored with one density matrix per mode.
QuantumState product_state(const HilbertSpec& spec, const CVec& spin_ket,
                           const std::vector<CMat>& mode_states);

CMat kron(const CMat& a, const CMat& b);

cplx expectation(const QuantumState& state, const Operator& op);
cplx expectation(const QuantumState& state, const CMat& op);
QuantumState partial_trace(const QuantumState& state, const std::vector<int>& keep);
double fidelity_with_pure(const QuantumState& state, const CVec& psi);
// Population of the top two Fock levels of a mode.
double top_fock_population(const QuantumState& state, int mode = 0);
// Von Neumann entropy (natural log) of a density matrix.
double entropy(const CMat& rho);

// H(t) = sum_k c_k(t) O_k with sparse O_k.
class TimeDependentOperator {
 public:
  using Coefficient = std::function<cplx(double)>;

  TimeDependentOperator() = default;
  explicit TimeDependentOperator(std::size_t dimension) : dim_(dimension) {}

  void add_constant(Operator op);
  void add_term(Operator op, Coefficient coefficient);

  std::size_t dimension() const { return dim_; }
  bool empty() const { return constant_.nonZeros() == 0 && terms_.empty(); }
  Operator at(double t) const;
  // out = H(t) * rho (dense).
  void apply(double t, const CMat& rho, CMat& out) const;

 private:
  std::size_t dim_ = 0;
  Operator constant_;
  std::vector<std::pair<Operator, Coefficient>> terms_;
};

struct LindbladChannel {
  Operator collapse_operator;
  std::string label;
};

struct EvolveOptions {
  IntegratorConfig integrator;
  StateTolerances tolerances;
  // Reject runs whose top-two Fock population exceeds this threshold.
  double truncation_threshold = 1e-8;
  bool check_truncation = true;
};

// Integrates the Lindblad equation from state.time for `duration` seconds.
// Returns states at the requested offsets (each in [0, duration]); the final
// state is appended when sample_offsets is empty.
std::vector<QuantumState> evolve(const QuantumState& state, const TimeDependentOperator& hamiltonian,
                                 const std::vector<LindbladChannel>& channels, double duration,
                                 const EvolveOptions& options = {},
                                 const std::vector<double>& sample_offsets = {});

QuantumState evolve_final(const QuantumState& state, const TimeDependentOperator& hamiltonian,
                          const std::vector<LindbladChannel>& channels, double duration,
                          const EvolveOptions& options = {});

// Fock cutoff for thermal/displacement studies: the larger of
// ceil(8(n+1) + 4|alpha|^2) and the thermal-tail rule P(n >= N-1) < 1e-10.
int recommended_cutoff(double nbar, double max_alpha_sq = 0.0);

}  // namespace iongate
