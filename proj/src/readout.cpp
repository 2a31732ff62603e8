#include "iongate/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <boost/math/tools/roots.hpp>

namespace iongate {

namespace {

constexpr int kDecayBins = 200;

// (bright duration, weight) support of the summed bright time of `shelved`
// shelved ions, discretised on midpoints of kDecayBins bins per ion.
std::vector<std::pair<double, double>> bright_time_distribution(const ReadoutModel& m, int shelved) {
  const double t = m.detect_time;
  const double p_stay = std::isinf(m.shelf_lifetime) ? 1.0 : std::exp(-t / m.shelf_lifetime);
  std::vector<std::pair<double, double>> single{{0.0, p_stay}};
  if (p_stay < 1.0) {
    const double h = t / kDecayBins;
    for (int k = 0; k < kDecayBins; ++k) {
      // Bright time u after a decay at t - u has density exp(-(t - u)/tau)/tau.
      const double w = std::exp(-(t - (k + 1) * h) / m.shelf_lifetime) - std::exp(-(t - k * h) / m.shelf_lifetime);
      single.emplace_back((k + 0.5) * h, w);
    }
  }
  // Sums of bin midpoints fall on a half-bin grid, so convolved supports are
  // merged by grid index.
  const double half = 0.5 * t / kDecayBins;
  std::vector<double> grid{1.0};
  for (int s = 0; s < shelved; ++s) {
    std::vector<double> next(grid.size() + 2 * kDecayBins + 1, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (const auto& [u, w] : single) next[i + static_cast<std::size_t>(std::lround(u / half))] += grid[i] * w;
    grid = std::move(next);
  }
  std::vector<std::pair<double, double>> dist;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] > 0.0) dist.emplace_back(static_cast<double>(i) * half, grid[i]);
  return dist;
}

double poisson_log_pmf(std::int64_t n, double lambda) {
  if (lambda <= 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return n * std::log(lambda) - lambda - std::lgamma(static_cast<double>(n) + 1.0);
}

double max_mean(const ReadoutModel& m) { return 2.0 * std::max(m.bright_rate, m.dark_rate) * m.detect_time; }

int count_limit(const ReadoutModel& m) {
  const double l = max_mean(m);
  return static_cast<int>(std::ceil(l + 20.0 * std::sqrt(l) + 20.0));
}

// Photon-count pmf for `bright` bright ions and 2 - bright shelved ions.
std::vector<double> count_pmf(const ReadoutModel& m, int bright, int n_max) {
  const int shelved = 2 - bright;
  std::vector<double> pmf(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (const auto& [u, w] : bright_time_distribution(m, shelved)) {
    if (w <= 0.0) continue;
    const double lambda = m.bright_rate * (bright * m.detect_time + u) +
                          m.dark_rate * (shelved * m.detect_time - u);
    const double width = 15.0 * std::sqrt(lambda) + 15.0;
    const int lo = std::max(0, static_cast<int>(lambda - width));
    const int hi = std::min(n_max, static_cast<int>(lambda + width) + 1);
    for (int n = lo; n <= hi; ++n) pmf[n] += w * std::exp(poisson_log_pmf(n, lambda));
  }
  return pmf;
}

std::array<double, 3> classify_pmf(const std::vector<double>& pmf, const std::array<int, 2>& th) {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    const int cls = static_cast<int>(n) < th[0] ? 0 : static_cast<int>(n) < th[1] ? 1 : 2;
    p[cls] += pmf[n];
  }
  // Mass beyond the tabulated range is far into class 2.
  p[2] += std::max(0.0, 1.0 - (p[0] + p[1] + p[2]));
  return p;
}

int classify(std::int64_t counts, const std::array<int, 2>& th) {
  return counts < th[0] ? 0 : counts < th[1] ? 1 : 2;
}

SpamEstimate spam_from_fractions(const std::array<double, 3>& dd, const std::array<double, 3>& uu, double shots) {
  SpamEstimate e;
  e.eps_down = 0.5 * dd[1] + dd[2];
  e.eps_up = 0.5 * uu[1] + uu[0];
  e.eps_spam = 0.5 * (e.eps_down + e.eps_up);
  if (shots > 0.0) {
    e.se_down = std::sqrt(e.eps_down * (1.0 - e.eps_down) / (2.0 * shots));
    e.se_up = std::sqrt(e.eps_up * (1.0 - e.eps_up) / (2.0 * shots));
    e.se_spam = 0.5 * std::hypot(e.se_down, e.se_up);
  }
  return e;
}

double condition_number(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
  const auto s = svd.singularValues();
  return s(2) > 0.0 ? s(0) / s(2) : std::numeric_limits<double>::infinity();
}

Eigen::Vector3d bell_populations(double aligned) { return {0.5 * aligned, 1.0 - aligned, 0.5 * aligned}; }

double observed_parity(const Eigen::Vector3d& v) { return v(0) + v(2) - v(1); }

}  // namespace

std::vector<std::string> diagnostics(const ReadoutModel& m) {
  std::vector<std::string> out;
  if (!(m.bright_rate >= 0.0) || !(m.dark_rate >= 0.0)) out.push_back("count rates must be >= 0");
  if (!(m.detect_time > 0.0) || std::isinf(m.detect_time)) out.push_back("detect_time must be finite and > 0");
  if (!(m.shelf_lifetime > 0.0)) out.push_back("shelf_lifetime must be > 0");
  if (!(m.thresholds[0] > 0 && m.thresholds[1] > m.thresholds[0]))
    out.push_back("thresholds must be positive and strictly increasing");
  if (!(m.prep_error >= 0.0 && m.prep_error < 0.5)) out.push_back("prep_error must lie in [0, 0.5)");
  return out;
}

double shelf_decay_probability(const ReadoutModel& m) {
  if (std::isinf(m.shelf_lifetime)) return 0.0;
  return -std::expm1(-m.detect_time / m.shelf_lifetime);
}

Detection simulate_detection(TwoIonClass state, const ReadoutModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int n_up = static_cast<int>(state);
  const double p_decay = shelf_decay_probability(m);
  double lambda = 0.0;
  for (int ion = 0; ion < 2; ++ion) {
    bool up = ion < n_up;
    if (uni(rng) < m.prep_error) up = !up;
    double bright_time = 0.0;
    if (up) {
      bright_time = m.detect_time;
    } else if (p_decay > 0.0 && uni(rng) < p_decay) {
      // Decay instant from the exponential law conditioned on t < detect_time.
      const double t_decay = -m.shelf_lifetime * std::log1p(-uni(rng) * p_decay);
      bright_time = m.detect_time - std::min(t_decay, m.detect_time);
    }
    lambda += m.bright_rate * bright_time + m.dark_rate * (m.detect_time - bright_time);
  }
  Detection d;
  d.counts = std::poisson_distribution<std::int64_t>(lambda)(rng);
  d.observed_class = classify(d.counts, m.thresholds);
  return d;
}

Detection simulate_detection(TwoIonClass state, const ReadoutModel& m, std::uint64_t seed) {
  throw_if_invalid(diagnostics(m));
  std::mt19937_64 rng(seed);
  return simulate_detection(state, m, rng);
}

std::array<double, 3> class_probabilities(const ReadoutModel& m, int n_up, bool with_prep) {
  throw_if_invalid(diagnostics(m));
  if (n_up < 0 || n_up > 2) throw Error("n_up must be 0, 1 or 2");
  const double p = with_prep ? m.prep_error : 0.0;
  // Distribution of the actual number of up ions after preparation errors.
  std::array<double, 3> actual{0.0, 0.0, 0.0};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const bool up_a = (0 < n_up) != (a == 1);
      const bool up_b = (1 < n_up) != (b == 1);
      const double w = (a ? p : 1.0 - p) * (b ? p : 1.0 - p);
      actual[static_cast<int>(up_a) + static_cast<int>(up_b)] += w;
    }
  const int n_max = count_limit(m);
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int bright = 0; bright < 3; ++bright) {
    if (actual[bright] == 0.0) continue;
    const auto cls = classify_pmf(count_pmf(m, bright, n_max), m.thresholds);
    for (int k = 0; k < 3; ++k) out[k] += actual[bright] * cls[k];
  }
  return out;
}

std::array<int, 2> optimal_thresholds(const ReadoutModel& m, int max_count) {
  const int n_max = max_count > 0 ? max_count : count_limit(m);
  std::array<std::vector<double>, 3> cdf;
  for (int b = 0; b < 3; ++b) {
    const auto pmf = count_pmf(m, b, n_max);
    cdf[b].assign(pmf.size() + 1, 0.0);
    for (std::size_t n = 0; n < pmf.size(); ++n) cdf[b][n + 1] = cdf[b][n] + pmf[n];
    cdf[b].back() = 1.0;
  }
  const int top = n_max + 1;
  std::array<int, 2> best{1, 2};
  double best_err = std::numeric_limits<double>::infinity();
  for (int t1 = 1; t1 < top; ++t1)
    for (int t2 = t1 + 1; t2 <= top; ++t2) {
      // P(n < t) = cdf[t].
      const double err = (1.0 - cdf[0][t1]) + (cdf[1][t1] + 1.0 - cdf[1][t2]) + cdf[2][t2];
      if (err < best_err) {
        best_err = err;
        best = {t1, t2};
      }
    }
  return best;
}

SpamEstimate estimate_spam(const ReadoutModel& m, std::int64_t shots_per_state, std::uint64_t seed) {
  throw_if_invalid(diagnostics(m));
  if (shots_per_state < 1) throw Error("shots_per_state must be >= 1");
  std::mt19937_64 rng(seed);
  std::array<double, 3> dd{0.0, 0.0, 0.0};
  std::array<double, 3> uu{0.0, 0.0, 0.0};
  for (std::int64_t s = 0; s < shots_per_state; ++s) dd[simulate_detection(TwoIonClass::kDownDown, m, rng).observed_class] += 1.0;
  for (std::int64_t s = 0; s < shots_per_state; ++s) uu[simulate_detection(TwoIonClass::kUpUp, m, rng).observed_class] += 1.0;
  const double n = static_cast<double>(shots_per_state);
  for (int k = 0; k < 3; ++k) {
    dd[k] /= n;
    uu[k] /= n;
  }
  return spam_from_fractions(dd, uu, n);
}

SpamEstimate spam_truth(const ReadoutModel& m) {
  return spam_from_fractions(class_probabilities(m, 0), class_probabilities(m, 2), 0.0);
}

double calibrate_prep_error(const ReadoutModel& m, double target) {
  ReadoutModel probe = m;
  const auto residual = [&](double p) {
    probe.prep_error = p;
    return spam_truth(probe).eps_spam - target;
  };
  const double lo = residual(0.0);
  if (lo > 0.0) throw Error("readout errors alone exceed the SPAM target");
  const double hi_p = 0.25;
  if (residual(hi_p) < 0.0) throw Error("SPAM target out of reach for prep_error <= 0.25");
  boost::uintmax_t iters = 100;
  const auto tol = [](double a, double b) { return std::abs(b - a) < 1e-15; };
  const auto [a, b] = boost::math::tools::toms748_solve(residual, 0.0, hi_p, tol, iters);
  return 0.5 * (a + b);
}

SpamMap build_spam_map(double ed, double eu) {
  if (!(ed >= 0.0 && ed < 0.5 && eu >= 0.0 && eu < 0.5)) throw Error("per-qubit errors must lie in [0, 0.5)");
  SpamMap s;
  s.eps_down = ed;
  s.eps_up = eu;
  // A down ion reads bright with ed, an up ion reads dark with eu.
  s.m.col(0) << (1 - ed) * (1 - ed), 2 * ed * (1 - ed), ed * ed;
  const double p2 = ed * (1 - eu);
  const double p0 = (1 - ed) * eu;
  s.m.col(1) << p0, 1.0 - p0 - p2, p2;
  s.m.col(2) << eu * eu, 2 * eu * (1 - eu), (1 - eu) * (1 - eu);
  s.condition_number = condition_number(s.m);
  return s;
}

SpamMap exact_spam_map(const ReadoutModel& m) {
  SpamMap s;
  for (int k = 0; k < 3; ++k) {
    const auto p = class_probabilities(m, k);
    s.m.col(k) << p[0], p[1], p[2];
  }
  const auto e = spam_truth(m);
  s.eps_down = e.eps_down;
  s.eps_up = e.eps_up;
  s.condition_number = condition_number(s.m);
  return s;
}

Eigen::Vector3d correct_populations(const Eigen::Vector3d& observed, const SpamMap& map) {
  if (!std::isfinite(map.condition_number) || map.condition_number > 1e12) throw CalibrationError("SPAM map is not invertible");
  Eigen::Vector3d x = map.m.fullPivLu().solve(observed);
  for (int k = 0; k < 3; ++k) {
    if (x(k) < -1e-6) throw CalibrationError("corrected population " + std::to_string(k) + " is negative beyond tolerance");
    x(k) = std::max(0.0, x(k));
  }
  const double total = x.sum();
  if (total > 0.0) x *= observed.sum() / total;
  return x;
}

BellReadout observe_bell(const BellReadout& truth, const Eigen::Matrix3d& observe) {
  const Eigen::Vector3d pop = observe * bell_populations(truth.psum);
  const double plus = observed_parity(observe * bell_populations(0.5 * (1.0 + truth.c)));
  const double minus = observed_parity(observe * bell_populations(0.5 * (1.0 - truth.c)));
  return {0.5 * (plus - minus), pop(0) + pop(2)};
}

BellReadout observe_and_correct(const BellReadout& truth, const Eigen::Matrix3d& observe, const SpamMap& correction) {
  const auto through = [&](double aligned) {
    return correct_populations(observe * bell_populations(aligned), correction);
  };
  const Eigen::Vector3d pop = through(truth.psum);
  const double plus = observed_parity(through(0.5 * (1.0 + truth.c)));
  const double minus = observed_parity(through(0.5 * (1.0 - truth.c)));
  return {0.5 * (plus - minus), pop(0) + pop(2)};
}

double uncorrected_inflation(const ReadoutModel& m, const BellReadout& truth) {
  return truth.fidelity() - observe_bell(truth, exact_spam_map(m).m).fidelity();
}

ShelfBiasResult shelf_decay_bias_study(const ReadoutModel& m, const BellReadout& truth) {
  const SpamMap exact = exact_spam_map(m);
  const SpamMap assumed = build_spam_map(exact.eps_down, exact.eps_up);
  ShelfBiasResult r;
  r.f_true = truth.fidelity();
  r.f_inferred = observe_and_correct(truth, exact.m, assumed).fidelity();
  r.bias = r.f_true - r.f_inferred;
  return r;
}

Json to_json(const ReadoutModel& m) {
  Json j;
  j["bright_rate"] = m.bright_rate;
  j["dark_rate"] = m.dark_rate;
  j["detect_time"] = m.detect_time;
  j["shelf_lifetime"] = std::isinf(m.shelf_lifetime) ? Json("inf") : Json(m.shelf_lifetime);
  j["thresholds"] = {m.thresholds[0], m.thresholds[1]};
  j["prep_error"] = m.prep_error;
  return j;
}

ReadoutModel readout_from_json(const Json& j) {
  ReadoutModel m;
  m.bright_rate = j.at("bright_rate").get<double>();
  m.dark_rate = j.at("dark_rate").get<double>();
  m.detect_time = j.at("detect_time").get<double>();
  const auto& life = j.at("shelf_lifetime");
  m.shelf_lifetime = life.is_string() ? std::numeric_limits<double>::infinity() : life.get<double>();
  m.thresholds = {j.at("thresholds").at(0).get<int>(), j.at("thresholds").at(1).get<int>()};
  m.prep_error = j.at("prep_error").get<double>();
  throw_if_invalid(diagnostics(m));
  return m;
}

Json to_json(const SpamEstimate& e) {
  Json j;
  j["eps_down"] = e.eps_down;
  j["se_down"] = e.se_down;
  j["eps_up"] = e.eps_up;
  j["se_up"] = e.se_up;
  j["eps_spam"] = e.eps_spam;
  j["se_spam"] = e.se_spam;
  return j;
}

}  // namespace iongate
