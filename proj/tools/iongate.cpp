// Command-line driver: one subcommand per study, CSV/JSON tables out.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "iongate/budget.hpp"
#include "iongate/config.hpp"
#include "iongate/gate.hpp"
#include "iongate/rb.hpp"
#include "iongate/readout.hpp"
#include "iongate/spinecho.hpp"
#include "iongate/tomography.hpp"
#include "iongate/validation.hpp"

namespace fs = std::filesystem;
using namespace iongate;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr const char* kOutEnv = "IONGATE_OUT_DIR";

struct Common {
  std::string config_path;
  std::string profile = "table1-100us";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  unsigned jobs = 1;
};

// Primary table plus a summary object; both land in the output file.
struct StudyOutput {
  Table table;
  Json summary = Json::object();
  bool failed = false;
};

struct Context {
  ExperimentConfig cfg;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

Context load(const Common& o) {
  Context ctx;
  ctx.cfg = o.config_path.empty() ? builtin_profile(o.profile) : load_config(o.config_path);
  if (o.seed) ctx.cfg.seed = *o.seed;
  throw_if_invalid(validate(ctx.cfg));
  ctx.seed = ctx.cfg.seed;
  ctx.jobs = std::max(1u, o.jobs);
  return ctx;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v;
  for (const double x : linspace(std::log(a), std::log(b), n)) v.push_back(std::exp(x));
  v.front() = a;
  v.back() = b;
  return v;
}

Json fit_json(const FitResult& f) {
  return {{"c", f.c},           {"c0", f.c0},         {"phi0", f.phi0},
          {"se_c", f.se_c},     {"se_c0", f.se_c0},   {"se_phi0", f.se_phi0},
          {"log_likelihood", f.log_likelihood}, {"reduced_chi2", f.reduced_chi2}, {"at_boundary", f.at_boundary}};
}

// ------------------------------------------------------------------ studies

StudyOutput run_budget(const Context& ctx) {
  StudyOutput out;
  const auto b = budget_table(ctx.cfg.noise, ctx.cfg.gate);
  out.table.columns = {"channel", "error"};
  for (const auto& [label, e] : b.entries()) out.table.add_row({label, e});
  out.table.add_row({std::string("total"), b.total()});
  out.summary["t_g"] = ctx.cfg.gate.gate_time();
  out.summary["total"] = b.total();
  out.summary["crosstalk"] = crosstalk_error(ctx.cfg.apparatus.crosstalk_rabi_off, ctx.cfg.apparatus.crosstalk_rabi_on);
  return out;
}

StudyOutput run_curves(const Context& ctx, int points, double t_min, double t_max) {
  StudyOutput out;
  const auto grid = logspace(t_min, t_max, points);
  const auto& n = ctx.cfg.noise;
  const auto table = ScatteringTable::constant_power(ctx.cfg.gate.gate_time(), n.raman_rate, n.rayleigh_deph_rate, grid);
  const auto curves = model_curves(n, ctx.cfg.gate, table, grid);
  out.table.columns = {"t_g"};
  for (const auto& [label, e] : curves.front().budget.entries()) out.table.columns.push_back(label);
  out.table.columns.push_back("total");
  for (const auto& p : curves) {
    std::vector<Cell> row{p.t_g};
    for (const auto& [label, e] : p.budget.entries()) row.emplace_back(e);
    row.emplace_back(p.budget.total());
    out.table.add_row(std::move(row));
  }
  out.summary["largest_channels"] = largest_channels(curves, 4);
  return out;
}

StudyOutput run_dynamics(const Context& ctx, int points) {
  StudyOutput out;
  const GateConfig c = calibrated(ctx.cfg.gate);
  const auto grid = linspace(0.0, c.gate_time(), points);
  const auto numeric = parallel_map(grid.size(), ctx.jobs, [&](std::size_t i) {
    return population_dynamics(c, {grid[i]}).front();
  });
  const auto analytic = population_dynamics_analytic(c, grid);
  out.table.columns = {"raman_time", "p_dd", "p_flip", "p_uu", "p_dd_analytic", "p_flip_analytic", "p_uu_analytic"};
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& a = numeric[i];
    const auto& b = analytic[i];
    out.table.add_row({grid[i], a.p_dd, a.p_flip, a.p_uu, b.p_dd, b.p_flip, b.p_uu});
    worst = std::max({worst, std::abs(a.p_dd - b.p_dd), std::abs(a.p_flip - b.p_flip), std::abs(a.p_uu - b.p_uu)});
  }
  out.summary["rabi"] = c.rabi;
  out.summary["max_analytic_difference"] = worst;
  return out;
}

StudyOutput run_parity(const Context& ctx, double contrast, double psum, std::int64_t shots, int phases) {
  StudyOutput out;
  const auto data = synthesize_parity(contrast, 0.0, 0.3, uniform_phases(phases), shots, derive_seed(ctx.seed, 1));
  const auto ml = fit_ml_binomial(data);
  const auto ls = fit_least_squares(data);
  out.table.columns = {"phase_rad", "even_counts", "shots", "p_ml", "p_ls"};
  for (std::size_t i = 0; i < data.phases.size(); ++i)
    out.table.add_row({data.phases[i], data.even_counts[i], data.total_shots[i],
                       fringe_probability(ml.c, ml.c0, ml.phi0, data.phases[i]),
                       fringe_probability(ls.c, ls.c0, ls.phi0, data.phases[i])});
  FidelityInputs in;
  in.c = ml.c;
  in.se_c = ml.se_c;
  in.psum = psum;
  in.eps_se = epsilon_se(ctx.cfg.spin_echo, ctx.cfg.gate.gate_time());
  const auto f = bell_fidelity(in);
  out.summary["ml"] = fit_json(ml);
  out.summary["ls"] = fit_json(ls);
  out.summary["fidelity"] = {{"f", f.f}, {"se_f", f.se_f}, {"eps_se", in.eps_se}, {"gate_error", f.gate_error},
                             {"se_gate_error", f.se_gate_error}, {"nonphysical", f.nonphysical}};
  return out;
}

StudyOutput run_bias_study(const Context& ctx, double contrast, std::int64_t shots, int datasets) {
  StudyOutput out;
  BiasStudyParams p;
  p.c = contrast;
  p.shots = shots;
  p.n_datasets = datasets;
  p.seed = derive_seed(ctx.seed, 2);
  p.jobs = ctx.jobs;
  const auto r = bias_study(p);
  out.table.columns = {"dataset", "c_ml", "c_ls"};
  for (std::size_t i = 0; i < r.ml_c.size(); ++i)
    out.table.add_row({static_cast<std::int64_t>(i), r.ml_c[i], r.ls_c[i]});
  out.summary = {{"c_true", contrast},     {"ml_bias", r.ml_bias}, {"ml_bias_se", r.ml_bias_se},
                 {"ls_bias", r.ls_bias}, {"ls_bias_se", r.ls_bias_se}};
  return out;
}

StudyOutput run_spinecho(const Context& ctx, int points, double t_max) {
  StudyOutput out;
  const auto grid = linspace(0.0, t_max, points);
  const auto e = simulate_epsilon_se(ctx.cfg.spin_echo, grid);
  out.table.columns = {"t_g", "eps_se"};
  for (std::size_t i = 0; i < grid.size(); ++i) out.table.add_row({grid[i], e[i]});
  const auto peak = first_maximum(ctx.cfg.spin_echo, grid[1], t_max);
  out.summary = {{"first_maximum_t_g", peak.t_g}, {"first_maximum", peak.error},
                 {"eps_se_at_config_t_g", epsilon_se(ctx.cfg.spin_echo, ctx.cfg.gate.gate_time())}};
  return out;
}

StudyOutput run_multigate(const Context& ctx, int max_gates, double per_gate) {
  StudyOutput out;
  const double drift = ctx.cfg.noise.intensity_drift_frac;
  std::vector<int> n;
  std::vector<double> sim;
  out.table.columns = {"n_gates", "model", "simulated"};
  for (int k = 1; k <= max_gates; ++k) {
    n.push_back(k);
    sim.push_back(multi_gate_error_simulated(k, per_gate, drift));
    out.table.add_row({static_cast<std::int64_t>(k), multi_gate_error(k, per_gate, drift), sim.back()});
  }
  const auto fit = fit_linear_quadratic(n, sim);
  out.summary = {{"per_gate_error", per_gate},
                 {"drift_frac", drift},
                 {"fit_linear", fit.linear},
                 {"fit_quadratic", fit.quadratic},
                 {"predicted_quadratic", kPi * kPi / 4.0 * drift * drift}};
  return out;
}

StudyOutput run_readout(const Context& ctx, std::int64_t shots) {
  StudyOutput out;
  const auto& m = ctx.cfg.readout;
  const auto est = estimate_spam(m, shots, derive_seed(ctx.seed, 3));
  const auto truth = spam_truth(m);
  const auto bias = shelf_decay_bias_study(m);
  out.table.columns = {"quantity", "value", "se"};
  out.table.add_row({std::string("eps_down"), est.eps_down, est.se_down});
  out.table.add_row({std::string("eps_up"), est.eps_up, est.se_up});
  out.table.add_row({std::string("eps_spam"), est.eps_spam, est.se_spam});
  out.table.add_row({std::string("eps_spam_truth"), truth.eps_spam, 0.0});
  out.table.add_row({std::string("shelf_decay_probability"), shelf_decay_probability(m), 0.0});
  out.table.add_row({std::string("uncorrected_inflation"), uncorrected_inflation(m), 0.0});
  out.table.add_row({std::string("shelf_bias_f_true"), bias.f_true, 0.0});
  out.table.add_row({std::string("shelf_bias_f_inferred"), bias.f_inferred, 0.0});
  out.table.add_row({std::string("shelf_bias"), bias.bias, 0.0});
  out.summary["model"] = to_json(m);
  out.summary["estimate"] = to_json(est);
  return out;
}

StudyOutput run_rbm(const Context& ctx) {
  StudyOutput out;
  RbPlan plan = ctx.cfg.rb;
  plan.seed = derive_seed(ctx.seed, 4);
  const auto records = simulate_rb(plan, ctx.cfg.rb_noise, ctx.jobs);
  out.table = to_table(records);
  out.summary = to_json(fit_decay(records));
  return out;
}

StudyOutput run_validate(const Context& ctx) {
  StudyOutput out;
  const auto report = run_validation(ctx.seed, ctx.jobs);
  out.table = report.to_table();
  out.summary["coverage"] = report.coverage_manifest();
  out.summary["all_passed"] = report.all_passed();
  out.failed = !report.all_passed();
  for (const auto& c : report.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.id << "  " << c.detail << '\n';
  return out;
}

// ------------------------------------------------------------------ driver

void emit(const std::string& name, const Common& o, const Context& ctx, const StudyOutput& s, double wall) {
  fs::path dir = o.out;
  if (dir.empty()) {
    const char* env = std::getenv(kOutEnv);
    dir = env ? env : ".";
  }
  fs::create_directories(dir);
  const std::string hash = config_hash(ctx.cfg);
  const fs::path primary = dir / (name + "." + o.format);
  if (o.format == "csv") {
    write_file(primary.string(), s.table.to_csv());
    write_file((dir / (name + ".summary.json")).string(),
               result_envelope(hash, ctx.seed, s.summary).dump(2) + "\n");
  } else {
    Json outputs = {{"table", s.table.to_json()}, {"summary", s.summary}};
    write_file(primary.string(), result_envelope(hash, ctx.seed, outputs).dump(2) + "\n");
  }
  // Run manifest; wall time makes it the one non-reproducible artifact.
  Json manifest = {{"subcommand", name},
                   {"config_hash", hash},
                   {"seed", ctx.seed},
                   {"outputs", {primary.string()}},
                   {"wall_time_s", wall}};
  if (o.format == "csv") manifest["outputs"].push_back((dir / (name + ".summary.json")).string());
  write_file((dir / (name + ".manifest.json")).string(), manifest.dump(2) + "\n");
  std::cerr << name << ": wrote " << primary.string() << " (config " << hash << ", seed " << ctx.seed << ")\n";
}

void add_common(CLI::App* sub, Common& o) {
  auto* cfg = sub->add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  sub->add_option("--profile", o.profile, "built-in profile (table1-100us, fast-gate-3.8us, rbm-paper)")->excludes(cfg);
  sub->add_option("--seed", o.seed, "master seed (overrides the configuration)");
  sub->add_option("--out", o.out, std::string("output directory (default $") + kOutEnv + " or .)");
  sub->add_option("--format", o.format, "primary output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", o.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
}

void print_config_error(const ConfigError& e) {
  Json j = {{"error", "config"}, {"diagnostics", e.diagnostics()}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion two-qubit gate error model and statistics toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common o;
  std::string chosen;
  std::function<StudyOutput(const Context&)> study;
  const auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    return sub;
  };

  auto* budget = add("budget", "Table-1 error budget at the configured gate time");
  budget->callback([&] { study = run_budget; });

  int curve_points = 60;
  double t_min = 3.8e-6, t_max = 520e-6;
  auto* curves = add("curves", "per-channel model error against gate time");
  curves->add_option("--points", curve_points, "log-spaced gate times")->check(CLI::Range(2, 10000));
  curves->add_option("--t-min", t_min, "shortest gate time, s")->check(CLI::PositiveNumber);
  curves->add_option("--t-max", t_max, "longest gate time, s")->check(CLI::PositiveNumber);
  curves->callback([&] { study = [&](const Context& c) { return run_curves(c, curve_points, t_min, t_max); }; });

  int dyn_points = 50;
  auto* dynamics = add("dynamics", "spin populations against Raman pulse time");
  dynamics->add_option("--points", dyn_points, "grid points")->check(CLI::Range(2, 10000));
  dynamics->callback([&] { study = [&](const Context& c) { return run_dynamics(c, dyn_points); }; });

  double contrast = 0.995, psum = 0.9997;
  std::int64_t shots = 1000;
  int phases = 16;
  auto* parity = add("parity", "synthesize a parity scan, fit it and compose the Bell fidelity");
  parity->add_option("--contrast", contrast, "true parity contrast")->check(CLI::Range(0.0, 1.0));
  parity->add_option("--psum", psum, "P_dd + P_uu")->check(CLI::Range(0.0, 1.0));
  parity->add_option("--shots", shots, "shots per phase")->check(CLI::PositiveNumber);
  parity->add_option("--phases", phases, "analysis phases")->check(CLI::Range(3, 100000));
  parity->callback([&] { study = [&](const Context& c) { return run_parity(c, contrast, psum, shots, phases); }; });

  int datasets = 500;
  auto* bias = add("bias-study", "ML vs least-squares contrast bias over synthetic datasets");
  bias->add_option("--contrast", contrast, "true parity contrast")->check(CLI::Range(0.0, 1.0));
  bias->add_option("--shots", shots, "shots per phase")->check(CLI::PositiveNumber);
  bias->add_option("--datasets", datasets, "ensemble size")->check(CLI::Range(2, 10000000));
  bias->callback([&] { study = [&](const Context& c) { return run_bias_study(c, contrast, shots, datasets); }; });

  int se_points = 501;
  double se_t_max = 500e-6;
  auto* spinecho = add("spinecho", "spin-echo Bell error against gate time");
  spinecho->add_option("--points", se_points, "grid points from 0")->check(CLI::Range(3, 1000000));
  spinecho->add_option("--t-max", se_t_max, "longest gate time, s")->check(CLI::PositiveNumber);
  spinecho->callback([&] { study = [&](const Context& c) { return run_spinecho(c, se_points, se_t_max); }; });

  int max_gates = 20;
  double per_gate = 1.5e-3;
  auto* multigate = add("multigate", "error of N sequential gates with a coherent intensity error");
  multigate->add_option("--max-gates", max_gates, "largest N")->check(CLI::Range(1, 100000));
  multigate->add_option("--per-gate", per_gate, "incoherent error per gate")->check(CLI::Range(0.0, 1.0));
  multigate->callback([&] { study = [&](const Context& c) { return run_multigate(c, max_gates, per_gate); }; });

  std::int64_t spam_shots = 100000;
  auto* readout = add("readout", "SPAM estimation and shelf-decay bias study");
  readout->add_option("--shots", spam_shots, "shots per prepared state")->check(CLI::PositiveNumber);
  readout->callback([&] { study = [&](const Context& c) { return run_readout(c, spam_shots); }; });

  auto* rbm = add("rbm", "single-qubit randomized benchmarking simulation and fit");
  rbm->callback([&] { study = run_rbm; });

  auto* validate_cmd = add("validate", "analytic-vs-oracle and property suite");
  validate_cmd->callback([&] { study = run_validate; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  for (const auto* sub : app.get_subcommands()) chosen = sub->get_name();

  try {
    const Context ctx = load(o);
    const auto start = std::chrono::steady_clock::now();
    const StudyOutput s = study(ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(chosen, o, ctx, s, wall);
    return s.failed ? kExitValidation : 0;
  } catch (const ConfigError& e) {
    print_config_error(e);
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << Json({{"error", "runtime"}, {"message", e.what()}}).dump() << '\n';
    return 1;
  }
}
