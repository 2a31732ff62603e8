#include "iongate/tomography.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "iongate/core.hpp"

namespace iongate {

std::vector<std::string> diagnostics(const ParityDataset& d) {
  std::vector<std::string> out;
  const std::size_t n = d.phases.size();
  if (d.even_counts.size() != n || d.total_shots.size() != n)
    out.push_back("parity dataset columns must have equal length");
  if (n < 8) out.push_back("parity dataset needs at least 8 phase points");
  for (std::size_t i = 0; i < std::min({n, d.even_counts.size(), d.total_shots.size()}); ++i) {
    if (!std::isfinite(d.phases[i])) out.push_back("phase " + std::to_string(i) + " is not finite");
    if (d.total_shots[i] <= 0) out.push_back("shots at point " + std::to_string(i) + " must be > 0");
    if (d.even_counts[i] < 0 || d.even_counts[i] > d.total_shots[i])
      out.push_back("even_counts at point " + std::to_string(i) + " must lie in [0, shots]");
  }
  if (n >= 2) {
    const auto [lo, hi] = std::minmax_element(d.phases.begin(), d.phases.end());
    // n points uniformly covering a span reach one parity period of pi.
    const double span = (*hi - *lo) * static_cast<double>(n) / static_cast<double>(n - 1);
    if (span < kPi - 1e-12) out.push_back("parity phases must span at least one period (pi)");
  }
  return out;
}

std::vector<double> uniform_phases(int n) {
  if (n < 1) throw Error("uniform_phases: n must be >= 1");
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = kTwoPi * i / n;
  return p;
}

double parity(const std::array<double, 4>& p) {
  const double s = p[0] + p[1] + p[2] + p[3];
  if (std::abs(s - 1.0) > 1e-9) throw Error("parity: populations must sum to 1 (got " + std::to_string(s) + ")");
  return p[0] + p[3] - p[1] - p[2];
}

double fringe_probability(double c, double c0, double phi0, double phi) {
  return 0.5 * (1.0 + c0 + c * std::sin(2.0 * (phi - phi0)));
}

ParityDataset synthesize_parity(double c, double c0, double phi0, const std::vector<double>& phases,
                                std::int64_t shots_per_point, std::uint64_t seed) {
  if (shots_per_point <= 0) throw Error("synthesize_parity: shots must be > 0");
  std::mt19937_64 gen(seed);
  ParityDataset d;
  for (double phi : phases) {
    double p = fringe_probability(c, c0, phi0, phi);
    if (p < -1e-12 || p > 1.0 + 1e-12)
      throw Error("synthesize_parity: model probability " + std::to_string(p) + " outside [0,1]");
    p = std::clamp(p, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> bin(shots_per_point, p);
    d.phases.push_back(phi);
    d.even_counts.push_back(bin(gen));
    d.total_shots.push_back(shots_per_point);
  }
  return d;
}

namespace {

using V3 = Eigen::Vector3d;
using M3 = Eigen::Matrix3d;

// Linear parameters x = (C0, a, b): p = (1 + C0 + a sin 2phi + b cos 2phi)/2.
struct Linear {
  V3 x;
  double c() const { return std::hypot(x[1], x[2]); }
  double phi0() const {
    double p = 0.5 * std::atan2(-x[2], x[1]);
    if (p < 0.0) p += kPi;
    if (p >= kPi) p -= kPi;
    return p;
  }
};

V3 design_row(double phi) { return V3(1.0, std::sin(2.0 * phi), std::cos(2.0 * phi)); }

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double ll_linear(const ParityDataset& d, const V3& x) {
  double ll = 0.0;
  for (std::size_t i = 0; i < d.phases.size(); ++i) {
    const double p = 0.5 * (1.0 + design_row(d.phases[i]).dot(x));
    const double k = static_cast<double>(d.even_counts[i]);
    const double n = static_cast<double>(d.total_shots[i]);
    if ((p <= 0.0 && k > 0) || (p >= 1.0 && k < n)) return -std::numeric_limits<double>::infinity();
    ll += xlogy(k, p) + xlogy(n - k, 1.0 - p);
  }
  return ll;
}

// Gradient and Hessian of the log-likelihood in x.
void ll_derivatives(const ParityDataset& d, const V3& x, V3& g, M3& h) {
  g.setZero();
  h.setZero();
  for (std::size_t i = 0; i < d.phases.size(); ++i) {
    const V3 r = design_row(d.phases[i]);
    const double p = 0.5 * (1.0 + r.dot(x));
    const double k = static_cast<double>(d.even_counts[i]);
    const double n = static_cast<double>(d.total_shots[i]);
    const double d1 = k / p - (n - k) / (1.0 - p);
    const double d2 = -k / (p * p) - (n - k) / ((1.0 - p) * (1.0 - p));
    g += 0.5 * d1 * r;
    h += 0.25 * d2 * r * r.transpose();
  }
}

// Slack of |C0| + |C| <= 1 on each side.
std::array<double, 2> slacks(const V3& x) {
  const double r = std::hypot(x[1], x[2]);
  return {1.0 - x[0] - r, 1.0 + x[0] - r};
}

double objective(const ParityDataset& d, const V3& x, double mu, bool all_phases) {
  if (all_phases) {
    const auto s = slacks(x);
    if (!(s[0] > 0.0 && s[1] > 0.0)) return -std::numeric_limits<double>::infinity();
    return ll_linear(d, x) + mu * (std::log(s[0]) + std::log(s[1]));
  }
  double b = 0.0;
  for (double phi : d.phases) {
    const double p = 0.5 * (1.0 + design_row(phi).dot(x));
    if (!(p > 0.0 && p < 1.0)) return -std::numeric_limits<double>::infinity();
    b += std::log(p) + std::log(1.0 - p);
  }
  return ll_linear(d, x) + mu * b;
}

// Barrier on 0 < p < 1 at each measured phase.
void data_barrier_derivatives(const ParityDataset& d, const V3& x, double mu, V3& g, M3& h) {
  for (double phi : d.phases) {
    const V3 r = design_row(phi);
    const double p = 0.5 * (1.0 + r.dot(x));
    g += mu * 0.5 * (1.0 / p - 1.0 / (1.0 - p)) * r;
    h -= mu * 0.25 * (1.0 / (p * p) + 1.0 / ((1.0 - p) * (1.0 - p))) * r * r.transpose();
  }
}

void barrier_derivatives(const V3& x, double mu, V3& g, M3& h) {
  const double r = std::max(std::hypot(x[1], x[2]), 1e-300);
  const Eigen::Vector2d u(x[1] / r, x[2] / r);
  M3 hess_g = M3::Zero();
  hess_g.block<2, 2>(1, 1) = -(Eigen::Matrix2d::Identity() - u * u.transpose()) / r;
  const auto s = slacks(x);
  for (int side = 0; side < 2; ++side) {
    const V3 grad_g(side == 0 ? -1.0 : 1.0, -u[0], -u[1]);
    g += mu * grad_g / s[side];
    h += mu * (hess_g / s[side] - grad_g * grad_g.transpose() / (s[side] * s[side]));
  }
}

struct Uncertainty {
  double c = 0.0, c0 = 0.0, phi0 = 0.0;
};

Uncertainty propagate(const Linear& lin, const M3& cov) {
  const double c = std::max(lin.c(), 1e-300);
  const double a = lin.x[1], b = lin.x[2];
  Eigen::Matrix<double, 3, 3> j = Eigen::Matrix3d::Zero();
  j(0, 0) = 1.0;                                     // C0
  j(1, 1) = a / c;                                   // C
  j(1, 2) = b / c;
  j(2, 1) = b / (2.0 * c * c);                       // phi0 = atan2(-b, a)/2
  j(2, 2) = -a / (2.0 * c * c);
  const M3 s = j * cov * j.transpose();
  return {std::sqrt(std::max(0.0, s(1, 1))), std::sqrt(std::max(0.0, s(0, 0))),
          std::sqrt(std::max(0.0, s(2, 2)))};
}

double reduced_chi2(const ParityDataset& d, const V3& x) {
  double chi = 0.0;
  for (std::size_t i = 0; i < d.phases.size(); ++i) {
    const double p = 0.5 * (1.0 + design_row(d.phases[i]).dot(x));
    const double n = static_cast<double>(d.total_shots[i]);
    const double var = n * p * (1.0 - p);
    const double res = static_cast<double>(d.even_counts[i]) - n * p;
    if (var > 0.0) chi += res * res / var;
  }
  const double dof = static_cast<double>(d.phases.size()) - 3.0;
  return dof > 0.0 ? chi / dof : std::numeric_limits<double>::quiet_NaN();
}

FitResult make_result(const ParityDataset& d, const Linear& lin, const M3& cov) {
  FitResult f;
  f.c = lin.c();
  f.c0 = lin.x[0];
  f.phi0 = lin.phi0();
  const Uncertainty u = propagate(lin, cov);
  f.se_c = u.c;
  f.se_c0 = u.c0;
  f.se_phi0 = u.phi0;
  f.log_likelihood = ll_linear(d, lin.x);
  f.reduced_chi2 = reduced_chi2(d, lin.x);
  return f;
}

// Solution of the weighted normal equations (unconstrained).
V3 weighted_ls(const ParityDataset& d, M3& normal) {
  normal.setZero();
  V3 rhs = V3::Zero();
  for (std::size_t i = 0; i < d.phases.size(); ++i) {
    const V3 r = design_row(d.phases[i]);
    const double k = static_cast<double>(d.even_counts[i]);
    const double n = static_cast<double>(d.total_shots[i]);
    const double y = 2.0 * k / n - 1.0;
    const double q = (k + 0.5) / (n + 1.0);
    const double w = n / (4.0 * q * (1.0 - q));
    normal += w * r * r.transpose();
    rhs += w * y * r;
  }
  Eigen::LDLT<M3> ldlt(normal);
  if (ldlt.info() != Eigen::Success) throw FitError("least-squares normal equations are singular");
  return ldlt.solve(rhs);
}

}  // namespace

double log_likelihood(const ParityDataset& data, double c, double c0, double phi0) {
  const V3 x(c0, c * std::cos(2.0 * phi0), -c * std::sin(2.0 * phi0));
  return ll_linear(data, x);
}

FitResult fit_least_squares(const ParityDataset& data) {
  throw_if_invalid(diagnostics(data));
  M3 normal;
  const Linear lin{weighted_ls(data, normal)};
  return make_result(data, lin, normal.inverse());
}

FitResult fit_ml_binomial(const ParityDataset& data, MlConstraint constraint) {
  const bool all_phases = constraint == MlConstraint::kAllPhases;
  throw_if_invalid(diagnostics(data));
  // Feasible start: least-squares solution pulled inside the constraint set.
  M3 normal;
  V3 x = weighted_ls(data, normal);
  {
    const double r = std::hypot(x[1], x[2]);
    const double scale = std::abs(x[0]) + r;
    if (scale > 0.9) x *= 0.9 / scale;
    if (std::hypot(x[1], x[2]) < 1e-3) x[1] += 1e-3;
  }
  int iterations = 0;
  for (double mu = 1.0; mu >= 1e-12; mu *= 0.1) {
    for (int it = 0; it < 200; ++it, ++iterations) {
      V3 g;
      M3 h;
      ll_derivatives(data, x, g, h);
      if (all_phases) {
        barrier_derivatives(x, mu, g, h);
      } else {
        data_barrier_derivatives(data, x, mu, g, h);
      }
      const V3 step = (-h).ldlt().solve(g);
      if (!step.allFinite()) throw FitError("ML Newton step is not finite");
      const double decrement = g.dot(step);
      const double f0 = objective(data, x, mu, all_phases);
      double t = 1.0;
      while (t > 1e-14 && !(objective(data, x + t * step, mu, all_phases) >= f0 + 0.25 * t * decrement)) t *= 0.5;
      if (t <= 1e-14) break;
      x += t * step;
      if (step.lpNorm<Eigen::Infinity>() * t < 1e-15 || decrement < 1e-20) break;
    }
  }
  if (!x.allFinite()) throw FitError("ML fit diverged");
  V3 g;
  M3 h;
  ll_derivatives(data, x, g, h);
  M3 info = -h;
  Eigen::LDLT<M3> ldlt(info);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
    throw FitError("ML observed information is not positive definite");
  FitResult f = make_result(data, Linear{x}, info.inverse());
  if (all_phases) {
    const auto s = slacks(x);
    f.at_boundary = std::min(s[0], s[1]) < 1e-6;
  } else {
    for (double phi : data.phases) {
      const double p = 0.5 * (1.0 + design_row(phi).dot(x));
      f.at_boundary = f.at_boundary || std::min(p, 1.0 - p) < 1e-6;
    }
  }
  f.iterations = iterations;
  return f;
}

BiasStudyResult bias_study(const BiasStudyParams& p) {
  if (p.n_datasets < 2) throw Error("bias_study: need at least 2 datasets");
  const auto phases = uniform_phases(p.n_phases);
  const auto fits = parallel_map(static_cast<std::size_t>(p.n_datasets), p.jobs, [&](std::size_t i) {
    const ParityDataset d = synthesize_parity(p.c, p.c0, p.phi0, phases, p.shots, derive_seed(p.seed, i));
    return std::array<double, 2>{fit_ml_binomial(d, p.constraint).c, fit_least_squares(d).c};
  });
  BiasStudyResult r;
  for (const auto& f : fits) {
    r.ml_c.push_back(f[0]);
    r.ls_c.push_back(f[1]);
  }
  const auto mean_se = [&](const std::vector<double>& v, double& mean, double& se) {
    double s = 0.0, s2 = 0.0;
    for (double x : v) s += x - p.c;
    mean = s / v.size();
    for (double x : v) s2 += (x - p.c - mean) * (x - p.c - mean);
    se = std::sqrt(s2 / (v.size() - 1.0) / v.size());
  };
  mean_se(r.ml_c, r.ml_bias, r.ml_bias_se);
  mean_se(r.ls_c, r.ls_bias, r.ls_bias_se);
  return r;
}

FidelityResult bell_fidelity(const FidelityInputs& in) {
  if (!(in.c >= 0.0 && in.c <= 1.0) || !(in.psum >= 0.0 && in.psum <= 1.0))
    throw Error("bell_fidelity: C and Psum must lie in [0,1]");
  FidelityResult r;
  r.c = in.c;
  r.psum = in.psum;
  r.f = 0.5 * (in.c + in.psum);
  r.se_f = 0.5 * std::hypot(in.se_c, in.se_psum);
  if (in.psum_raw >= 0.0) r.corrections.push_back({"spam", in.psum - in.psum_raw});
  r.corrections.push_back({"se", in.eps_se});
  r.gate_error = (1.0 - r.f) - in.eps_se;
  r.se_gate_error = std::hypot(r.se_f, in.se_eps_se);
  if (r.gate_error < 0.0) {
    r.nonphysical = true;
    warn("inferred gate error is negative: eps_SE exceeds the Bell-state error");
  }
  return r;
}

Table to_table(const ParityDataset& d) {
  throw_if_invalid(diagnostics(d));
  Table t;
  t.columns = {"phase_rad", "even_counts", "shots"};
  for (std::size_t i = 0; i < d.phases.size(); ++i) t.add_row({d.phases[i], d.even_counts[i], d.total_shots[i]});
  return t;
}

ParityDataset dataset_from_csv(const std::string& text) {
  const CsvText csv = parse_csv(text);
  if (csv.header != std::vector<std::string>{"phase_rad", "even_counts", "shots"})
    throw Error("parity CSV header must be phase_rad,even_counts,shots");
  ParityDataset d;
  for (const auto& r : csv.rows) {
    d.phases.push_back(std::stod(r[0]));
    d.even_counts.push_back(std::stoll(r[1]));
    d.total_shots.push_back(std::stoll(r[2]));
  }
  throw_if_invalid(diagnostics(d));
  return d;
}

Json dataset_to_json(const ParityDataset& d) { return to_table(d).to_json(); }

ParityDataset dataset_from_json(const Json& j) {
  if (!j.is_array()) throw Error("parity JSON must be an array of rows");
  ParityDataset d;
  for (const auto& row : j) {
    d.phases.push_back(row.at("phase_rad").get<double>());
    d.even_counts.push_back(row.at("even_counts").get<std::int64_t>());
    d.total_shots.push_back(row.at("shots").get<std::int64_t>());
  }
  throw_if_invalid(diagnostics(d));
  return d;
}

}  // namespace iongate
