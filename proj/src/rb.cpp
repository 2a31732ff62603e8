#include "iongate/rb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "iongate/core.hpp"

namespace iongate {

namespace {

using Vec3 = Eigen::Vector3d;
using Rot = Eigen::Matrix3d;

Rot rotation(const Vec3& axis, double angle) { return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(); }

Vec3 axis_vector(int axis) {
  const double phi = axis * kPi / 2.0;
  return {std::cos(phi), std::sin(phi), 0.0};
}

// Ideal rotation of a computational gate.
Rot ideal_gate(const RbGate& g) {
  Rot r = Rot::Identity();
  if (g.pauli == 1) r = rotation(Vec3::UnitX(), kPi);
  if (g.pauli == 2) r = rotation(Vec3::UnitY(), kPi);
  if (g.pauli == 3) r = rotation(Vec3::UnitZ(), kPi);
  if (g.axis >= 0) r = rotation(axis_vector(g.axis), kPi / 2.0) * r;
  return r;
}

// Bloch vector of |down>, the initial state.
const Vec3 kDown{0.0, 0.0, -1.0};

class PhaseProcess {
 public:
  PhaseProcess(const NoiseModel1Q& n, std::uint64_t seed) : noise_(n), rng_(seed) {
    active_ = n.phase_noise == PhaseNoiseKind::kOrnsteinUhlenbeck && n.phase_noise_amplitude > 0.0;
    if (active_) {
      decay_ = std::exp(-n.pulse_time / n.phase_noise_correlation);
      value_ = n.phase_noise_amplitude * normal_(rng_);
    }
  }
  // Phase during the next pulse; the process advances by one pulse time.
  double next() {
    if (!active_) return 0.0;
    const double v = value_;
    value_ = value_ * decay_ + noise_.phase_noise_amplitude * std::sqrt(1.0 - decay_ * decay_) * normal_(rng_);
    return v;
  }

 private:
  const NoiseModel1Q& noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  bool active_ = false;
  double decay_ = 0.0;
  double value_ = 0.0;
};

Rot noisy_pulse(int axis, const NoiseModel1Q& n, double phase) {
  const double phi = axis * kPi / 2.0 + phase;
  const double omega = (kPi / 2.0) * (1.0 + n.amplitude_error_frac) / n.pulse_time;
  const Vec3 w{omega * std::cos(phi), omega * std::sin(phi), kTwoPi * n.detuning_error};
  return rotation(w, w.norm() * n.pulse_time);
}

bool stochastic(const NoiseModel1Q& n) {
  return n.phase_noise == PhaseNoiseKind::kOrnsteinUhlenbeck && n.phase_noise_amplitude > 0.0;
}

}  // namespace

std::vector<std::string> diagnostics(const RbPlan& plan) {
  std::vector<std::string> out;
  if (plan.sequence_lengths.empty()) out.push_back("rb sequence_lengths must not be empty");
  for (std::size_t i = 0; i < plan.sequence_lengths.size(); ++i) {
    if (plan.sequence_lengths[i] < 0) out.push_back("rb sequence lengths must be >= 0");
    if (i > 0 && plan.sequence_lengths[i] <= plan.sequence_lengths[i - 1])
      out.push_back("rb sequence_lengths must be strictly increasing");
  }
  if (plan.n_sequences < 1) out.push_back("rb n_sequences must be >= 1");
  if (plan.shots < 1) out.push_back("rb shots must be >= 1");
  if (!std::isfinite(plan.phase_offset)) out.push_back("rb phase_offset must be finite");
  return out;
}

std::vector<std::string> diagnostics(const NoiseModel1Q& n) {
  std::vector<std::string> out;
  if (!(n.depolarizing_per_gate >= 0.0 && n.depolarizing_per_gate <= 0.5))
    out.push_back("depolarizing_per_gate must lie in [0, 0.5]");
  if (!(n.phase_noise_amplitude >= 0.0)) out.push_back("phase_noise_amplitude must be >= 0");
  if (!(n.phase_noise_correlation > 0.0)) out.push_back("phase_noise_correlation must be > 0");
  if (!std::isfinite(n.detuning_error)) out.push_back("detuning_error must be finite");
  if (!(n.amplitude_error_frac > -1.0) || !std::isfinite(n.amplitude_error_frac))
    out.push_back("amplitude_error_frac must be finite and > -1");
  if (!(n.pulse_time > 0.0)) out.push_back("pulse_time must be > 0");
  return out;
}

int physical_pulses(const RbGate& g) { return (g.pauli == 1 || g.pauli == 2 ? 2 : 0) + (g.axis >= 0 ? 1 : 0); }

std::vector<RbSequence> generate_sequences(const RbPlan& plan) {
  throw_if_invalid(diagnostics(plan));
  std::vector<RbSequence> out;
  std::uint64_t index = 0;
  for (const int length : plan.sequence_lengths)
    for (int s = 0; s < plan.n_sequences; ++s, ++index) {
      std::mt19937_64 rng(derive_seed(plan.seed, index));
      std::uniform_int_distribution<int> pauli(0, 3);
      std::uniform_int_distribution<int> axis(plan.include_identity ? -1 : 0, 3);
      RbSequence seq;
      seq.length = length;
      seq.sequence_id = s;
      Rot net = Rot::Identity();
      for (int k = 0; k < length; ++k) {
        RbGate g{pauli(rng), axis(rng)};
        net = ideal_gate(g) * net;
        seq.gates.push_back(g);
      }
      const Vec3 v = net * kDown;
      const bool flip = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
      if (std::abs(v.z()) > 0.5) {
        seq.expect_up = v.z() > 0.0;
      } else {
        // A pi/2 pulse about z x v sends v to -z; about its negative to +z.
        Vec3 a = Vec3::UnitZ().cross(v);
        if (flip) a = -a;
        const int idx = static_cast<int>(std::lround(std::atan2(a.y(), a.x()) / (kPi / 2.0)));
        seq.recovery_axis = (idx + 4) % 4;
        seq.expect_up = flip;
      }
      out.push_back(std::move(seq));
    }
  return out;
}

double sequence_survival(const RbSequence& seq, const NoiseModel1Q& n, double phase_offset, std::uint64_t noise_seed) {
  PhaseProcess process(n, noise_seed);
  const double shrink = 1.0 - 2.0 * n.depolarizing_per_gate;
  Vec3 r = kDown;
  const auto pulse = [&](int axis) { r = noisy_pulse(axis, n, phase_offset + process.next()) * r; };
  for (const auto& g : seq.gates) {
    if (g.pauli == 1) pulse(0), pulse(0);
    if (g.pauli == 2) pulse(1), pulse(1);
    if (g.pauli == 3) r = rotation(Vec3::UnitZ(), kPi) * r;
    if (g.axis >= 0) pulse(g.axis);
    r *= shrink;
  }
  if (seq.recovery_axis >= 0) pulse(seq.recovery_axis);
  const double up = 0.5 * (1.0 + r.z());
  return std::clamp(seq.expect_up ? up : 1.0 - up, 0.0, 1.0);
}

std::vector<RbRecord> simulate_rb(const RbPlan& plan, const NoiseModel1Q& noise, unsigned jobs) {
  throw_if_invalid(diagnostics(noise));
  const auto sequences = generate_sequences(plan);
  const bool per_shot = stochastic(noise);
  const std::uint64_t stream = derive_seed(plan.seed, 0x5eed5eedULL);
  return parallel_map(sequences.size(), jobs, [&](std::size_t i) {
    const auto& seq = sequences[i];
    std::mt19937_64 rng(derive_seed(stream, i));
    RbRecord rec{seq.length, seq.sequence_id, 0, plan.shots};
    if (per_shot) {
      for (std::int64_t s = 0; s < plan.shots; ++s) {
        const double q = sequence_survival(seq, noise, plan.phase_offset, rng());
        rec.successes += std::bernoulli_distribution(q)(rng) ? 1 : 0;
      }
    } else {
      const double q = sequence_survival(seq, noise, plan.phase_offset, 0);
      rec.successes = std::binomial_distribution<std::int64_t>(plan.shots, q)(rng);
    }
    return rec;
  });
}

RbResult fit_decay(const std::vector<RbRecord>& data, double fixed_b) {
  std::map<int, std::pair<double, double>> pooled;  // length -> (successes, shots)
  for (const auto& r : data) {
    if (r.shots < 1 || r.successes < 0 || r.successes > r.shots) throw FitError("invalid RB record");
    pooled[r.length].first += static_cast<double>(r.successes);
    pooled[r.length].second += static_cast<double>(r.shots);
  }
  RbResult res;
  res.b_fixed = !std::isnan(fixed_b);
  const int n_par = res.b_fixed ? 2 : 3;
  if (static_cast<int>(pooled.size()) < n_par) throw FitError("RB fit needs more distinct lengths than parameters");
  std::vector<double> weight;
  for (const auto& [l, ks] : pooled) {
    const double q = (ks.first + 0.5) / (ks.second + 1.0);
    res.lengths.push_back(l);
    res.survival.push_back(ks.first / ks.second);
    res.survival_se.push_back(std::sqrt(q * (1.0 - q) / ks.second));
    weight.push_back(1.0 / (res.survival_se.back() * res.survival_se.back()));
  }
  const int m = static_cast<int>(res.lengths.size());

  // Parameters (A, p[, B]); Levenberg-Marquardt on the weighted residuals.
  Eigen::VectorXd x(n_par);
  const double b0 = res.b_fixed ? fixed_b : 0.5;
  x(0) = std::max(1e-3, res.survival.front() - b0);
  const double span = std::max(1, res.lengths.back() - res.lengths.front());
  const double ratio = std::clamp((res.survival.back() - b0) / x(0), 1e-6, 1.0);
  x(1) = std::clamp(std::pow(ratio, 1.0 / span), 0.0, 1.0);
  if (!res.b_fixed) x(2) = b0;

  const auto model = [&](const Eigen::VectorXd& p, int i) {
    return p(0) * std::pow(p(1), res.lengths[i]) + (res.b_fixed ? fixed_b : p(2));
  };
  const auto chi2 = [&](const Eigen::VectorXd& p) {
    double c = 0.0;
    for (int i = 0; i < m; ++i) c += weight[i] * std::pow(res.survival[i] - model(p, i), 2);
    return c;
  };
  const auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd j(m, n_par);
    for (int i = 0; i < m; ++i) {
      const double l = res.lengths[i];
      j(i, 0) = std::pow(p(1), l);
      j(i, 1) = l > 0 ? p(0) * l * std::pow(p(1), l - 1) : 0.0;
      if (!res.b_fixed) j(i, 2) = 1.0;
    }
    return j;
  };
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weight.data(), m);
  double lambda = 1e-3;
  double current = chi2(x);
  bool converged = false;
  for (int it = 0; it < 500 && !converged; ++it) {
    const Eigen::MatrixXd j = jacobian(x);
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r(i) = res.survival[i] - model(x, i);
    const Eigen::MatrixXd jtwj = j.transpose() * w.asDiagonal() * j;
    const Eigen::VectorXd g = j.transpose() * w.asDiagonal() * r;
    Eigen::MatrixXd a = jtwj;
    a.diagonal() += lambda * jtwj.diagonal().cwiseMax(1e-12);
    Eigen::VectorXd trial = x + a.ldlt().solve(g);
    trial(1) = std::clamp(trial(1), 0.0, 1.0);
    const double next = chi2(trial);
    if (next <= current) {
      converged = (current - next) <= 1e-14 * (1.0 + current) && (trial - x).norm() < 1e-13;
      x = trial;
      current = next;
      lambda = std::max(1e-12, lambda / 10.0);
    } else {
      lambda *= 10.0;
      converged = lambda > 1e12;
    }
  }
  if (!converged || !x.allFinite()) throw FitError("RB decay fit did not converge");

  const Eigen::MatrixXd j = jacobian(x);
  const Eigen::MatrixXd cov = (j.transpose() * w.asDiagonal() * j).inverse();
  res.a = x(0);
  res.p = x(1);
  res.b = res.b_fixed ? fixed_b : x(2);
  res.se_p = std::sqrt(std::max(0.0, cov(1, 1)));
  res.error_per_gate = 0.5 * (1.0 - res.p);
  res.se_error_per_gate = 0.5 * res.se_p;
  res.reduced_chi2 = m > n_par ? current / (m - n_par) : 0.0;
  if (!(res.se_error_per_gate > 0.0)) throw FitError("RB fit covariance is singular");
  return res;
}

Table to_table(const std::vector<RbRecord>& data) {
  Table t;
  t.columns = {"length", "sequence_id", "successes", "shots"};
  for (const auto& r : data)
    t.add_row({std::int64_t{r.length}, std::int64_t{r.sequence_id}, r.successes, r.shots});
  return t;
}

std::vector<RbRecord> rb_records_from_csv(const std::string& text) {
  const CsvText csv = parse_csv(text);
  if (csv.header != std::vector<std::string>{"length", "sequence_id", "successes", "shots"})
    throw Error("RB CSV header must be length,sequence_id,successes,shots");
  std::vector<RbRecord> out;
  for (const auto& r : csv.rows) out.push_back({std::stoi(r[0]), std::stoi(r[1]), std::stoll(r[2]), std::stoll(r[3])});
  return out;
}

Json to_json(const RbResult& r) {
  Json j;
  j["error_per_gate"] = r.error_per_gate;
  j["se_error_per_gate"] = r.se_error_per_gate;
  j["a"] = r.a;
  j["p"] = r.p;
  j["b"] = r.b;
  j["b_fixed"] = r.b_fixed;
  j["reduced_chi2"] = r.reduced_chi2;
  Json pts = Json::array();
  for (std::size_t i = 0; i < r.lengths.size(); ++i)
    pts.push_back({{"length", r.lengths[i]}, {"survival", r.survival[i]}, {"se", r.survival_se[i]}});
  j["points"] = pts;
  return j;
}

}  // namespace iongate
