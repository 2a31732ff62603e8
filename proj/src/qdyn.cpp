#include "iongate/qdyn.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "iongate/spin.hpp"

namespace iongate {

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : Error([&] {
        std::string msg = "invalid configuration";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

void throw_if_invalid(const std::vector<std::string>& diagnostics) {
  if (!diagnostics.empty()) throw ConfigError(diagnostics);
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

void validate(const IntegratorConfig& cfg) {
  std::vector<std::string> diag;
  if (!(cfg.rel_tol > 0.0)) diag.push_back("integrator.rel_tol must be > 0");
  if (!(cfg.abs_tol > 0.0)) diag.push_back("integrator.abs_tol must be > 0");
  if (!(cfg.max_step > 0.0)) diag.push_back("integrator.max_step must be > 0");
  if (cfg.method == IntegratorConfig::Method::kFixedRK4 && !std::isfinite(cfg.max_step))
    diag.push_back("integrator.max_step must be finite for fixed-step RK4");
  throw_if_invalid(diag);
}

// ---------------------------------------------------------------- HilbertSpec

int HilbertSpec::n_modes() const {
  if (fock_cutoff <= 0) return 0;
  return mode_labels.empty() ? 1 : static_cast<int>(mode_labels.size());
}

std::size_t HilbertSpec::subsystem_dimension(int index) const {
  if (index < 0 || index >= n_subsystems()) throw DimensionError("subsystem index out of range");
  return index < n_spins ? 2u : static_cast<std::size_t>(fock_cutoff + 1);
}

std::size_t HilbertSpec::spin_dimension() const { return std::size_t{1} << n_spins; }

std::size_t HilbertSpec::mode_dimension() const {
  std::size_t d = 1;
  for (int m = 0; m < n_modes(); ++m) d *= static_cast<std::size_t>(fock_cutoff + 1);
  return d;
}

std::size_t HilbertSpec::dimension() const { return spin_dimension() * mode_dimension(); }

void validate(const HilbertSpec& spec) {
  std::vector<std::string> diag;
  if (spec.n_spins < 0 || spec.n_spins > 16) diag.push_back("n_spins must be in [0, 16]");
  if (spec.fock_cutoff < 0) diag.push_back("fock_cutoff must be >= 0");
  if (spec.fock_cutoff == 0 && !spec.mode_labels.empty())
    diag.push_back("mode_labels given without a motional mode (fock_cutoff = 0)");
  throw_if_invalid(diag);
}

bool operator==(const HilbertSpec& a, const HilbertSpec& b) {
  return a.n_spins == b.n_spins && a.fock_cutoff == b.fock_cutoff && a.n_modes() == b.n_modes();
}

// ---------------------------------------------------------------- operators

namespace {

Operator sparse_identity(std::size_t n) {
  Operator id(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  id.setIdentity();
  return id;
}

Operator to_sparse(const CMat& m) {
  Operator s = m.sparseView(1.0, 0.0);
  s.makeCompressed();
  return s;
}

Operator sparse_kron(const Operator& a, const Operator& b) {
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (Operator::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (Operator::InnerIterator ib(b, kb); ib; ++ib)
          trip.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                            ia.value() * ib.value());
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

CMat ladder(int cutoff) {
  const int d = cutoff + 1;
  CMat a = CMat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace

OperatorSet::OperatorSet(HilbertSpec spec, std::size_t max_dimension) : spec_(std::move(spec)) {
  validate(spec_);
  // Guard against overflow before multiplying out the dimension.
  const double approx = std::pow(2.0, spec_.n_spins) *
                        std::pow(static_cast<double>(spec_.fock_cutoff + 1), spec_.n_modes());
  if (approx > static_cast<double>(max_dimension)) {
    std::ostringstream os;
    os << "Hilbert-space dimension " << approx << " exceeds ceiling " << max_dimension;
    throw DimensionError(os.str());
  }
  dim_ = spec_.dimension();
  identity_ = sparse_identity(dim_);

  for (int j = 0; j < spec_.n_spins; ++j) {
    sx_.push_back(embed(pauli_x(), j));
    sy_.push_back(embed(pauli_y(), j));
    sz_.push_back(embed(pauli_z(), j));
    sp_.push_back(embed(sigma_plus_local(), j));
    sm_.push_back(embed(sigma_minus_local(), j));
  }
  for (int m = 0; m < spec_.n_modes(); ++m) {
    const CMat a = ladder(spec_.fock_cutoff);
    a_.push_back(embed(a, spec_.n_spins + m));
    ad_.push_back(embed(a.adjoint(), spec_.n_spins + m));
    n_.push_back(embed(a.adjoint() * a, spec_.n_spins + m));
  }
}

Operator OperatorSet::embed(const CMat& local, int subsystem) const {
  const auto d = spec_.subsystem_dimension(subsystem);
  if (static_cast<std::size_t>(local.rows()) != d || local.rows() != local.cols())
    throw DimensionError("local operator dimension does not match subsystem");
  std::size_t left = 1, right = 1;
  for (int k = 0; k < subsystem; ++k) left *= spec_.subsystem_dimension(k);
  for (int k = subsystem + 1; k < spec_.n_subsystems(); ++k) right *= spec_.subsystem_dimension(k);
  Operator out = sparse_kron(sparse_kron(sparse_identity(left), to_sparse(local)),
                             sparse_identity(right));
  out.makeCompressed();
  return out;
}

Operator OperatorSet::embed_spins(const CMat& spin_op) const {
  if (static_cast<std::size_t>(spin_op.rows()) != spec_.spin_dimension() ||
      spin_op.rows() != spin_op.cols())
    throw DimensionError("spin operator dimension does not match the spin register");
  Operator out = sparse_kron(to_sparse(spin_op), sparse_identity(spec_.mode_dimension()));
  out.makeCompressed();
  return out;
}

OperatorSet build_operators(const HilbertSpec& spec, std::size_t max_dimension) {
  return OperatorSet(spec, max_dimension);
}

// ---------------------------------------------------------------- states

bool StateDiagnostics::within(const StateTolerances& tol, double factor) const {
  return hermiticity_error <= tol.hermiticity * factor && trace_error <= tol.trace * factor &&
         min_eigenvalue >= tol.min_eigenvalue * factor;
}

StateDiagnostics diagnose(const QuantumState& state) {
  StateDiagnostics d;
  const CMat& r = state.rho;
  d.hermiticity_error = (r - r.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(r.trace() - cplx(1.0, 0.0));
  const CMat h = 0.5 * (r + r.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

double purity(const QuantumState& state) {
  return (state.rho * state.rho).trace().real();
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat thermal_mode(int cutoff, double nbar) {
  if (cutoff < 0) throw DimensionError("negative Fock cutoff");
  if (!(nbar >= 0.0)) throw Error("thermal occupation must be >= 0");
  const int d = cutoff + 1;
  CMat rho = CMat::Zero(d, d);
  if (nbar == 0.0) {
    rho(0, 0) = 1.0;
    return rho;
  }
  const double q = nbar / (nbar + 1.0);
  double norm = 0.0;
  for (int n = 0; n < d; ++n) norm += std::pow(q, n);
  for (int n = 0; n < d; ++n) rho(n, n) = std::pow(q, n) / norm;
  return rho;
}

QuantumState pure_state(const HilbertSpec& spec, const CVec& psi) {
  if (static_cast<std::size_t>(psi.size()) != spec.dimension())
    throw DimensionError("state vector dimension mismatch");
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > 1e-10) throw Error("state vector is not normalized");
  return QuantumState{spec, psi * psi.adjoint(), 0.0};
}

QuantumState product_state(const HilbertSpec& spec, const CVec& spin_ket,
                           const std::vector<CMat>& mode_states) {
  if (static_cast<std::size_t>(spin_ket.size()) != spec.spin_dimension())
    throw DimensionError("spin ket dimension mismatch");
  if (static_cast<int>(mode_states.size()) != spec.n_modes())
    throw DimensionError("one density matrix per mode required");
  CMat rho = spin_ket * spin_ket.adjoint();
  for (const auto& m : mode_states) {
    if (m.rows() != spec.fock_cutoff + 1) throw DimensionError("mode state dimension mismatch");
    rho = kron(rho, m);
  }
  return QuantumState{spec, rho, 0.0};
}

cplx expectation(const QuantumState& state, const Operator& op) {
  if (op.rows() != state.rho.rows()) throw DimensionError("operator dimension mismatch");
  return (op * state.rho).trace();
}

cplx expectation(const QuantumState& state, const CMat& op) {
  if (op.rows() != state.rho.rows()) throw DimensionError("operator dimension mismatch");
  return (op * state.rho).trace();
}

QuantumState partial_trace(const QuantumState& state, const std::vector<int>& keep) {
  const HilbertSpec& spec = state.spec;
  const int ns = spec.n_subsystems();
  std::vector<bool> kept(ns, false);
  for (int k : keep) {
    if (k < 0 || k >= ns) throw DimensionError("partial_trace: subsystem index out of range");
    if (kept[k]) throw DimensionError("partial_trace: duplicate subsystem index");
    kept[k] = true;
  }
  const int n_modes_kept = static_cast<int>(
      std::count_if(keep.begin(), keep.end(), [&](int k) { return k >= spec.n_spins; }));
  if (n_modes_kept != 0 && n_modes_kept != spec.n_modes() && spec.mode_labels.empty())
    throw DimensionError("partial_trace: cannot label a subset of unlabeled modes");

  std::vector<std::size_t> dims(ns);
  for (int k = 0; k < ns; ++k) dims[k] = spec.subsystem_dimension(k);
  const std::size_t full = spec.dimension();
  if (static_cast<std::size_t>(state.rho.rows()) != full)
    throw DimensionError("partial_trace: density matrix does not match its spec");

  std::size_t dk = 1, dt = 1;
  for (int k = 0; k < ns; ++k) (kept[k] ? dk : dt) *= dims[k];

  std::vector<std::size_t> kept_index(full), traced_index(full);
  for (std::size_t i = 0; i < full; ++i) {
    std::size_t rem = i, ki = 0, ti = 0, kstride = 1, tstride = 1;
    for (int k = ns - 1; k >= 0; --k) {
      const std::size_t digit = rem % dims[k];
      rem /= dims[k];
      if (kept[k]) {
        ki += digit * kstride;
        kstride *= dims[k];
      } else {
        ti += digit * tstride;
        tstride *= dims[k];
      }
    }
    kept_index[i] = ki;
    traced_index[i] = ti;
  }
  std::vector<std::vector<std::size_t>> groups(dt);
  for (std::size_t i = 0; i < full; ++i) groups[traced_index[i]].push_back(i);

  CMat out = CMat::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (const auto& g : groups)
    for (std::size_t i : g)
      for (std::size_t j : g) out(kept_index[i], kept_index[j]) += state.rho(i, j);

  HilbertSpec reduced;
  reduced.n_spins = static_cast<int>(
      std::count_if(keep.begin(), keep.end(), [&](int k) { return k < spec.n_spins; }));
  reduced.fock_cutoff = n_modes_kept > 0 ? spec.fock_cutoff : 0;
  if (n_modes_kept > 0 && !spec.mode_labels.empty())
    for (int k = spec.n_spins; k < ns; ++k)
      if (kept[k]) reduced.mode_labels.push_back(spec.mode_labels[k - spec.n_spins]);
  if (n_modes_kept > 0 && reduced.mode_labels.empty() && spec.n_modes() > 1)
    throw DimensionError("partial_trace: ambiguous mode labels");
  return QuantumState{reduced, out, state.time};
}

double fidelity_with_pure(const QuantumState& state, const CVec& psi) {
  if (psi.size() != state.rho.rows()) throw DimensionError("fidelity: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw Error("fidelity: state vector not normalized");
  const double f = (psi.adjoint() * state.rho * psi)(0, 0).real();
  if (f < -1e-9 || f > 1.0 + 1e-9) throw Error("fidelity outside [0,1]: state is not physical");
  return std::clamp(f, 0.0, 1.0);
}

double top_fock_population(const QuantumState& state, int mode) {
  const HilbertSpec& spec = state.spec;
  if (mode < 0 || mode >= spec.n_modes()) throw DimensionError("mode index out of range");
  const int sub = spec.n_spins + mode;
  std::size_t right = 1;
  for (int k = sub + 1; k < spec.n_subsystems(); ++k) right *= spec.subsystem_dimension(k);
  const std::size_t d = spec.subsystem_dimension(sub);
  double p = 0.0;
  for (Eigen::Index i = 0; i < state.rho.rows(); ++i) {
    const std::size_t level = (static_cast<std::size_t>(i) / right) % d;
    if (level + 2 >= d) p += state.rho(i, i).real();
  }
  return p;
}

double entropy(const CMat& rho) {
  const CMat h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-300) s -= l * std::log(l);
  }
  return s;
}

// ---------------------------------------------------------------- Hamiltonian

void TimeDependentOperator::add_constant(Operator op) {
  if (dim_ == 0) dim_ = static_cast<std::size_t>(op.rows());
  if (static_cast<std::size_t>(op.rows()) != dim_) throw DimensionError("term dimension mismatch");
  if (constant_.rows() == 0) {
    constant_ = std::move(op);
  } else {
    constant_ += op;
  }
  constant_.makeCompressed();
}

void TimeDependentOperator::add_term(Operator op, Coefficient coefficient) {
  if (dim_ == 0) dim_ = static_cast<std::size_t>(op.rows());
  if (static_cast<std::size_t>(op.rows()) != dim_) throw DimensionError("term dimension mismatch");
  op.makeCompressed();
  terms_.emplace_back(std::move(op), std::move(coefficient));
}

Operator TimeDependentOperator::at(double t) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Operator h(n, n);
  if (constant_.rows() != 0) h = constant_;
  for (const auto& [op, c] : terms_) h += c(t) * op;
  return h;
}

void TimeDependentOperator::apply(double t, const CMat& rho, CMat& out) const {
  if (constant_.rows() != 0) {
    out.noalias() = constant_ * rho;
  } else {
    out.setZero(rho.rows(), rho.cols());
  }
  for (const auto& [op, c] : terms_) {
    const cplx k = c(t);
    if (k != cplx(0.0, 0.0)) out.noalias() += k * (op * rho);
  }
}

// ---------------------------------------------------------------- evolution

namespace {

struct Lindbladian {
  const TimeDependentOperator& h;
  std::vector<Operator> ls;
  Operator gamma;  // (1/2) sum L^dag L
  bool has_h;
  mutable CMat work, lr;

  Lindbladian(const TimeDependentOperator& ham, const std::vector<LindbladChannel>& channels,
              std::size_t dim)
      : h(ham), has_h(!ham.empty()) {
    const auto n = static_cast<Eigen::Index>(dim);
    gamma.resize(n, n);
    for (const auto& c : channels) {
      if (c.collapse_operator.rows() != n || c.collapse_operator.cols() != n)
        throw DimensionError("collapse operator '" + c.label + "' has the wrong dimension");
      ls.push_back(c.collapse_operator);
      Operator ldl = Operator(c.collapse_operator.adjoint()) * c.collapse_operator;
      gamma += 0.5 * ldl;
    }
    gamma.makeCompressed();
  }

  void operator()(double t, const CMat& rho, CMat& out) const {
    if (has_h) {
      h.apply(t, rho, work);
      work *= cplx(0.0, -1.0);
    } else {
      work.setZero(rho.rows(), rho.cols());
    }
    if (!ls.empty()) work.noalias() -= gamma * rho;
    out = work + work.adjoint();
    for (const auto& l : ls) {
      lr.noalias() = l * rho;
      out.noalias() += l * lr.adjoint();
    }
  }
};

struct TruncationProbe {
  std::vector<std::vector<Eigen::Index>> indices;  // per mode

  explicit TruncationProbe(const HilbertSpec& spec) {
    for (int m = 0; m < spec.n_modes(); ++m) {
      const int sub = spec.n_spins + m;
      std::size_t right = 1;
      for (int k = sub + 1; k < spec.n_subsystems(); ++k) right *= spec.subsystem_dimension(k);
      const std::size_t d = spec.subsystem_dimension(sub);
      std::vector<Eigen::Index> idx;
      for (std::size_t i = 0; i < spec.dimension(); ++i)
        if ((i / right) % d + 2 >= d) idx.push_back(static_cast<Eigen::Index>(i));
      indices.push_back(std::move(idx));
    }
  }

  double worst(const CMat& rho) const {
    double w = 0.0;
    for (const auto& idx : indices) {
      double p = 0.0;
      for (auto i : idx) p += rho(i, i).real();
      w = std::max(w, p);
    }
    return w;
  }
};

void check_cheap(const CMat& rho, double t, const StateTolerances& tol) {
  const double tr = std::abs(rho.trace() - cplx(1.0, 0.0));
  if (tr > 10.0 * tol.trace) throw IntegratorFailure("trace drift " + std::to_string(tr), t);
  double herm = 0.0;
  for (Eigen::Index j = 0; j < rho.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      herm = std::max(herm, std::abs(rho(i, j) - std::conj(rho(j, i))));
  if (herm > 10.0 * tol.hermiticity)
    throw IntegratorFailure("Hermiticity drift " + std::to_string(herm), t);
}

void check_full(const QuantumState& s, const StateTolerances& tol) {
  const StateDiagnostics d = diagnose(s);
  if (!d.within(tol, 10.0)) {
    std::ostringstream os;
    os << "state invariant violated (herm " << d.hermiticity_error << ", trace " << d.trace_error
       << ", min eig " << d.min_eigenvalue << ")";
    throw IntegratorFailure(os.str(), s.time);
  }
}

}  // namespace

std::vector<QuantumState> evolve(const QuantumState& state, const TimeDependentOperator& hamiltonian,
                                 const std::vector<LindbladChannel>& channels, double duration,
                                 const EvolveOptions& options,
                                 const std::vector<double>& sample_offsets) {
  validate(options.integrator);
  const auto dim = static_cast<Eigen::Index>(state.spec.dimension());
  if (state.rho.rows() != dim || state.rho.cols() != dim)
    throw DimensionError("density matrix does not match its Hilbert spec");
  if (!hamiltonian.empty() && static_cast<Eigen::Index>(hamiltonian.dimension()) != dim)
    throw DimensionError("Hamiltonian dimension mismatch");
  if (!(duration >= 0.0)) throw Error("evolve: duration must be >= 0");
  check_full(state, options.tolerances);

  // Spot-check Hermiticity of H at the interval ends and midpoint.
  if (!hamiltonian.empty()) {
    for (double f : {0.0, 0.5, 1.0}) {
      const Operator h = hamiltonian.at(state.time + f * duration);
      const double dev = CMat(h - Operator(h.adjoint())).cwiseAbs().maxCoeff();
      if (dev > 1e-9 * std::max(1.0, CMat(h).cwiseAbs().maxCoeff()))
        throw Error("evolve: Hamiltonian is not Hermitian");
    }
  }

  std::vector<double> offsets = sample_offsets;
  if (offsets.empty()) offsets.push_back(duration);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i] < 0.0 || offsets[i] > duration * (1.0 + 1e-12))
      throw Error("evolve: sample offset outside [0, duration]");
    if (i > 0 && offsets[i] < offsets[i - 1]) throw Error("evolve: sample offsets must be sorted");
  }

  const Lindbladian rhs(hamiltonian, channels, state.spec.dimension());
  const TruncationProbe probe(state.spec);
  const bool truncation = options.check_truncation && state.spec.n_modes() > 0;
  const auto observe = [&](double t, const CMat& rho) {
    check_cheap(rho, t, options.tolerances);
    if (truncation) {
      const double top = probe.worst(rho);
      if (top > options.truncation_threshold)
        throw TruncationError("Fock truncation inadequate: top-two population " +
                                  std::to_string(top) + " at t=" + std::to_string(t),
                              t, top);
    }
  };
  if (truncation) observe(state.time, state.rho);

  std::vector<QuantumState> out;
  out.reserve(offsets.size());
  CMat y = state.rho;
  double t = state.time;
  for (double off : offsets) {
    const double target = state.time + std::min(off, duration);
    if (target > t) {
      if (options.integrator.method == IntegratorConfig::Method::kAdaptive) {
        integrate_dopri5(rhs, y, t, target, options.integrator, observe);
      } else {
        integrate_rk4(rhs, y, t, target, options.integrator.max_step, observe);
      }
      t = target;
    }
    QuantumState s{state.spec, y, t};
    check_full(s, options.tolerances);
    out.push_back(std::move(s));
  }
  return out;
}

QuantumState evolve_final(const QuantumState& state, const TimeDependentOperator& hamiltonian,
                          const std::vector<LindbladChannel>& channels, double duration,
                          const EvolveOptions& options) {
  return evolve(state, hamiltonian, channels, duration, options).back();
}

int recommended_cutoff(double nbar, double max_alpha_sq) {
  if (!(nbar >= 0.0) || !(max_alpha_sq >= 0.0)) throw Error("recommended_cutoff: negative input");
  const int rule = static_cast<int>(std::ceil(8.0 * (nbar + 1.0) + 4.0 * max_alpha_sq));
  int tail = 2;
  if (nbar > 0.0) {
    const double q = nbar / (nbar + 1.0);
    tail = 1 + static_cast<int>(std::ceil(std::log(1e-10) / std::log(q)));
  }
  tail += static_cast<int>(std::ceil(4.0 * max_alpha_sq)) + 2;
  const int floor = nbar <= 0.1 ? 20 : 0;
  return std::max({rule, tail, floor});
}

}  // namespace iongate
