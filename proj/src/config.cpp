#include "iongate/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "iongate/budget.hpp"

namespace iongate {

namespace {

namespace pt = boost::property_tree;

double parse_double(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ConfigError({key + ": expected a number, got '" + s + "'"});
  return v;
}

long long parse_int(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ConfigError({key + ": expected an integer, got '" + s + "'"});
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] != '-') v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ConfigError({key + ": expected an unsigned integer, got '" + s + "'"});
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError({key + ": expected true or false, got '" + s + "'"});
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError({key + ": empty list entry"});
    out.push_back(static_cast<int>(parse_int(key, item.substr(b, e - b + 1))));
  }
  return out;
}

std::string phase_noise_text(PhaseNoiseKind k) { return k == PhaseNoiseKind::kNone ? "none" : "ou"; }

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::string name() const { return section + "." + key; }
};

#define IONGATE_DOUBLE(sec, k, member)                                                       \
  Field {                                                                                    \
    sec, k, [](const ExperimentConfig& c) { return format_double(c.member); },              \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_double(sec "." k, v); } \
  }
#define IONGATE_INT(sec, k, member)                                                                      \
  Field {                                                                                                \
    sec, k, [](const ExperimentConfig& c) { return std::to_string(c.member); },                         \
        [](ExperimentConfig& c, const std::string& v) {                                                  \
          c.member = static_cast<std::remove_reference_t<decltype(c.member)>>(parse_int(sec "." k, v));                          \
        }                                                                                                \
  }
#define IONGATE_BOOL(sec, k, member)                                                     \
  Field {                                                                                \
    sec, k, [](const ExperimentConfig& c) { return bool_text(c.member); },              \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_bool(sec "." k, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f{
        {"meta", "profile", [](const ExperimentConfig& c) { return c.profile; },
         [](ExperimentConfig& c, const std::string& v) { c.profile = v; }},
        {"meta", "seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
         [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64("meta.seed", v); }},

        IONGATE_DOUBLE("gate", "eta_gate", gate.eta_gate),
        IONGATE_DOUBLE("gate", "eta_spec", gate.eta_spec),
        IONGATE_DOUBLE("gate", "rabi", gate.rabi),
        IONGATE_DOUBLE("gate", "delta_g", gate.delta_g),
        IONGATE_INT("gate", "loops", gate.loops),
        {"gate", "shape", [](const ExperimentConfig& c) { return to_string(c.gate.shape); },
         [](ExperimentConfig& c, const std::string& v) {
           try {
             c.gate.shape = shape_kind_from_string(v);
           } catch (const Error& e) {
             throw ConfigError({std::string("gate.shape: ") + e.what()});
           }
         }},
        IONGATE_DOUBLE("gate", "ramp_time", gate.ramp_time),
        IONGATE_DOUBLE("gate", "lightshift_amp", gate.lightshift_amp),
        IONGATE_DOUBLE("gate", "optical_phase", gate.optical_phase),
        IONGATE_DOUBLE("gate", "carrier_reduction", gate.carrier_reduction),
        IONGATE_DOUBLE("gate", "trap_freq", gate.trap_freq),
        IONGATE_DOUBLE("gate", "raman_detuning", gate.raman_detuning_meta),
        IONGATE_BOOL("gate", "lamb_dicke_exact", gate.lamb_dicke_exact),
        IONGATE_INT("gate", "fock_cutoff", gate.fock_cutoff),

        IONGATE_DOUBLE("noise", "nbar_gate", noise.nbar_gate),
        IONGATE_DOUBLE("noise", "nbar_spec", noise.nbar_spec),
        IONGATE_DOUBLE("noise", "heating_rate", noise.heating_rate),
        IONGATE_DOUBLE("noise", "motional_tau", noise.motional_tau),
        IONGATE_DOUBLE("noise", "spin_dephasing_coeff", noise.spin_dephasing_coeff),
        IONGATE_DOUBLE("noise", "raman_rate", noise.raman_rate),
        IONGATE_DOUBLE("noise", "rayleigh_deph_rate", noise.rayleigh_deph_rate),
        IONGATE_DOUBLE("noise", "intensity_drift_frac", noise.intensity_drift_frac),
        IONGATE_BOOL("noise", "correlated_dephasing", noise.correlated_dephasing),

        IONGATE_DOUBLE("spin_echo", "rabi_mw", spin_echo.rabi_mw),
        IONGATE_DOUBLE("spin_echo", "delta_f", spin_echo.delta_f),
        IONGATE_DOUBLE("spin_echo", "pulse_phase_1", spin_echo.pulse_phases[0]),
        IONGATE_DOUBLE("spin_echo", "pulse_phase_2", spin_echo.pulse_phases[1]),
        IONGATE_DOUBLE("spin_echo", "pulse_phase_3", spin_echo.pulse_phases[2]),
        IONGATE_DOUBLE("spin_echo", "gap_padding", spin_echo.gap_padding),

        IONGATE_DOUBLE("readout", "bright_rate", readout.bright_rate),
        IONGATE_DOUBLE("readout", "dark_rate", readout.dark_rate),
        IONGATE_DOUBLE("readout", "detect_time", readout.detect_time),
        IONGATE_DOUBLE("readout", "shelf_lifetime", readout.shelf_lifetime),
        IONGATE_INT("readout", "threshold_1", readout.thresholds[0]),
        IONGATE_INT("readout", "threshold_2", readout.thresholds[1]),
        IONGATE_DOUBLE("readout", "prep_error", readout.prep_error),

        {"rb", "sequence_lengths", [](const ExperimentConfig& c) { return join(c.rb.sequence_lengths); },
         [](ExperimentConfig& c, const std::string& v) { c.rb.sequence_lengths = parse_int_list("rb.sequence_lengths", v); }},
        IONGATE_INT("rb", "n_sequences", rb.n_sequences),
        IONGATE_INT("rb", "shots", rb.shots),
        IONGATE_BOOL("rb", "include_identity", rb.include_identity),
        IONGATE_DOUBLE("rb", "phase_offset", rb.phase_offset),

        IONGATE_DOUBLE("rb_noise", "depolarizing_per_gate", rb_noise.depolarizing_per_gate),
        {"rb_noise", "phase_noise", [](const ExperimentConfig& c) { return phase_noise_text(c.rb_noise.phase_noise); },
         [](ExperimentConfig& c, const std::string& v) {
           if (v == "none") c.rb_noise.phase_noise = PhaseNoiseKind::kNone;
           else if (v == "ou") c.rb_noise.phase_noise = PhaseNoiseKind::kOrnsteinUhlenbeck;
           else throw ConfigError({"rb_noise.phase_noise: expected none or ou, got '" + v + "'"});
         }},
        IONGATE_DOUBLE("rb_noise", "phase_noise_amplitude", rb_noise.phase_noise_amplitude),
        IONGATE_DOUBLE("rb_noise", "phase_noise_correlation", rb_noise.phase_noise_correlation),
        IONGATE_DOUBLE("rb_noise", "detuning_error", rb_noise.detuning_error),
        IONGATE_DOUBLE("rb_noise", "amplitude_error_frac", rb_noise.amplitude_error_frac),
        IONGATE_DOUBLE("rb_noise", "pulse_time", rb_noise.pulse_time),

        IONGATE_DOUBLE("apparatus", "qubit_freq", apparatus.qubit_freq),
        IONGATE_DOUBLE("apparatus", "magnetic_field", apparatus.magnetic_field),
        IONGATE_DOUBLE("apparatus", "breathing_freq", apparatus.breathing_freq),
        IONGATE_DOUBLE("apparatus", "micromotion_freq", apparatus.micromotion_freq),
        IONGATE_DOUBLE("apparatus", "crosstalk_rabi_off", apparatus.crosstalk_rabi_off),
        IONGATE_DOUBLE("apparatus", "crosstalk_rabi_on", apparatus.crosstalk_rabi_on),
    };
    return f;
  }();
  return table;
}

#undef IONGATE_DOUBLE
#undef IONGATE_INT
#undef IONGATE_BOOL

// Parameters that only ever come out of a calibration.
const std::vector<std::string> kCalibratedKeys{"gate.rabi", "gate.lightshift_amp", "noise.raman_rate",
                                               "noise.spin_dephasing_coeff", "readout.prep_error"};

std::vector<std::string> prefixed(const std::string& prefix, const std::vector<std::string>& d) {
  std::vector<std::string> out;
  for (const auto& s : d) out.push_back(s.rfind(prefix + ".", 0) == 0 ? s : prefix + ": " + s);
  return out;
}

void tag(ExperimentConfig& c, const std::string& key, ProvenanceKind kind, std::string note) {
  c.provenance[key] = {kind, std::move(note)};
}

ExperimentConfig table1_profile() {
  ExperimentConfig c;
  c.profile = "table1-100us";
  c.gate = GateConfig{};
  c.gate.lightshift_amp = calibrate_lightshift(c.gate, 4e-3, 16);
  c.noise.nbar_gate = 0.02;
  c.noise.nbar_spec = 0.02;
  c.noise.heating_rate = 2.2;
  c.noise.motional_tau = 0.2;
  c.noise.rayleigh_deph_rate = 1.0;
  c.noise.raman_rate = calibrate_raman_rate(0.4e-3, c.noise.rayleigh_deph_rate, c.gate.gate_time());
  c.noise.spin_dephasing_coeff = calibrate_spin_dephasing(0.2e-3, c.gate.gate_time());
  c.noise.intensity_drift_frac = 5e-3;
  c.readout.thresholds = optimal_thresholds(c.readout);
  c.readout.prep_error = calibrate_prep_error(c.readout, 1.74e-3);

  using K = ProvenanceKind;
  tag(c, "gate.eta_gate", K::kPaperAnchor, "Lamb-Dicke parameter of the axial COM mode");
  tag(c, "gate.eta_spec", K::kPaperAnchor, "Lamb-Dicke parameter of the spectator mode");
  tag(c, "gate.delta_g", K::kPaperAnchor, "K/t_g with K = 2, t_g = 100 us");
  tag(c, "gate.loops", K::kPaperAnchor, "two phase-space loops");
  tag(c, "gate.ramp_time", K::kAssumed, "smooth ramp rise time");
  tag(c, "gate.lightshift_amp", K::kCalibrated, "rectangular pulses give 4e-3 at t_g = 100 us, 16 optical phases");
  tag(c, "gate.carrier_reduction", K::kPaperAnchor, "micromotion reduction of the carrier");
  tag(c, "gate.trap_freq", K::kPaperAnchor, "axial COM frequency 1.95 MHz");
  tag(c, "noise.nbar_gate", K::kPaperAnchor, "Doppler/sideband cooled COM occupation");
  tag(c, "noise.nbar_spec", K::kAssumed, "spectator occupation taken equal to the gate mode");
  tag(c, "noise.heating_rate", K::kPaperAnchor, "two-ion COM heating rate 2.2 /s");
  tag(c, "noise.motional_tau", K::kPaperAnchor, "motional coherence time 200 ms");
  tag(c, "noise.rayleigh_deph_rate", K::kAssumed, "elastic scattering share of the scattering budget");
  tag(c, "noise.raman_rate", K::kCalibrated, "scattering row 0.4e-3 at t_g = 100 us");
  tag(c, "noise.spin_dephasing_coeff", K::kCalibrated, "spin-dephasing row 0.2e-3 at t_g = 100 us");
  tag(c, "noise.intensity_drift_frac", K::kAssumed, "0.5% slow intensity drift");
  tag(c, "spin_echo.rabi_mw", K::kPaperAnchor, "microwave Rabi frequency 82 kHz");
  tag(c, "spin_echo.delta_f", K::kPaperAnchor, "qubit frequency difference between the ions");
  tag(c, "readout.bright_rate", K::kAssumed, "count rates keep overlap errors below 0.1e-3");
  tag(c, "readout.dark_rate", K::kAssumed, "count rates keep overlap errors below 0.1e-3");
  tag(c, "readout.detect_time", K::kPaperAnchor, "1.9 ms detection");
  tag(c, "readout.shelf_lifetime", K::kPaperAnchor, "D5/2 lifetime 1168 ms");
  tag(c, "readout.threshold_1", K::kCalibrated, "grid search on the exact count distributions");
  tag(c, "readout.threshold_2", K::kCalibrated, "grid search on the exact count distributions");
  tag(c, "readout.prep_error", K::kCalibrated, "eps_SPAM = 1.74e-3");
  tag(c, "apparatus.qubit_freq", K::kPaperAnchor, "clock qubit splitting");
  tag(c, "apparatus.magnetic_field", K::kPaperAnchor, "static field");
  tag(c, "apparatus.crosstalk_rabi_off", K::kPaperAnchor, "residual Rabi frequency at the null");
  tag(c, "apparatus.crosstalk_rabi_on", K::kPaperAnchor, "addressed Rabi frequency");
  tag(c, "apparatus.breathing_freq", K::kPaperAnchor, "axial breathing (spectator) mode frequency");
  tag(c, "apparatus.micromotion_freq", K::kPaperAnchor, "rf drive frequency");
  tag(c, "gate.rabi", K::kCalibrated, "0 = solved at run time for a pi/2 geometric phase");
  tag(c, "gate.shape", K::kAssumed, "smooth ramped pulses");
  tag(c, "gate.optical_phase", K::kAssumed, "carrier light-shift phase; the budget averages over it");
  tag(c, "gate.raman_detuning", K::kPaperAnchor, "Raman beams about 3 THz from resonance");
  tag(c, "gate.lamb_dicke_exact", K::kAssumed, "first-order Lamb-Dicke force");
  tag(c, "gate.fock_cutoff", K::kAssumed, "0 = sized automatically from the peak displacement");
  tag(c, "noise.correlated_dephasing", K::kAssumed, "Rayleigh dephasing independent on each ion");
  tag(c, "spin_echo.pulse_phase_1", K::kAssumed, "microwave pulse phase pi/4");
  tag(c, "spin_echo.pulse_phase_2", K::kAssumed, "microwave pulse phase pi/4");
  tag(c, "spin_echo.pulse_phase_3", K::kAssumed, "microwave pulse phase pi/4");
  tag(c, "spin_echo.gap_padding", K::kAssumed, "no idle time between pulses");
  tag(c, "rb.sequence_lengths", K::kAssumed, "five lengths up to 1000 gates");
  tag(c, "rb.n_sequences", K::kPaperAnchor, "32 random sequences");
  tag(c, "rb.shots", K::kPaperAnchor, "300 repetitions per sequence");
  tag(c, "rb.include_identity", K::kAssumed, "computational gates exclude the identity Pauli");
  tag(c, "rb.phase_offset", K::kAssumed, "global phase of the pulse set");
  tag(c, "rb_noise.depolarizing_per_gate", K::kAssumed, "noise-free unless a profile sets it");
  tag(c, "rb_noise.phase_noise", K::kAssumed, "phase noise off by default");
  tag(c, "rb_noise.phase_noise_amplitude", K::kAssumed, "phase noise off by default");
  tag(c, "rb_noise.phase_noise_correlation", K::kAssumed, "1 ms correlation time");
  tag(c, "rb_noise.detuning_error", K::kAssumed, "no static detuning");
  tag(c, "rb_noise.amplitude_error_frac", K::kAssumed, "no pulse-area error");
  tag(c, "rb_noise.pulse_time", K::kAssumed, "2 us microwave pi/2 pulse");
  return c;
}

ExperimentConfig fast_gate_profile() {
  ExperimentConfig c = table1_profile();
  c.profile = "fast-gate-3.8us";
  const double t_anchor = c.gate.gate_time();
  const double t_fast = 3.8e-6;
  c.gate.delta_g = c.gate.loops / t_fast;
  c.gate.ramp_time = 0.5e-6;
  c.gate.lightshift_amp *= t_anchor / t_fast;
  const auto table = ScatteringTable::constant_power(t_anchor, c.noise.raman_rate, c.noise.rayleigh_deph_rate,
                                                     {t_fast, t_anchor});
  const auto [raman, rayleigh] = table.rates_at(t_fast);
  c.noise.raman_rate = raman;
  c.noise.rayleigh_deph_rate = rayleigh;
  using K = ProvenanceKind;
  tag(c, "gate.delta_g", K::kPaperAnchor, "K/t_g with K = 2, t_g = 3.8 us");
  tag(c, "gate.ramp_time", K::kAssumed, "ramp shortened to fit the 1.9 us pulses");
  tag(c, "gate.lightshift_amp", K::kCalibrated, "100 us calibration scaled with the drive, ~ 1/t_g");
  tag(c, "noise.raman_rate", K::kCalibrated, "100 us calibration scaled at constant beam power, ~ 1/t_g^2");
  tag(c, "noise.rayleigh_deph_rate", K::kAssumed, "100 us value scaled at constant beam power, ~ 1/t_g^2");
  return c;
}

ExperimentConfig rbm_profile() {
  ExperimentConfig c = table1_profile();
  c.profile = "rbm-paper";
  c.rb.sequence_lengths = {1, 100, 300, 600, 1000};
  c.rb.n_sequences = 32;
  c.rb.shots = 300;
  c.rb_noise.depolarizing_per_gate = 0.066e-3;
  using K = ProvenanceKind;
  tag(c, "rb.n_sequences", K::kPaperAnchor, "32 random sequences");
  tag(c, "rb.shots", K::kPaperAnchor, "300 repetitions per sequence");
  tag(c, "rb.sequence_lengths", K::kAssumed, "five lengths up to 1000 gates");
  tag(c, "rb_noise.depolarizing_per_gate", K::kAssumed, "tuned to the measured 0.066e-3 error per gate");
  return c;
}

}  // namespace

std::string to_string(ProvenanceKind kind) {
  switch (kind) {
    case ProvenanceKind::kPaperAnchor: return "paper-anchor";
    case ProvenanceKind::kCalibrated: return "calibrated";
    case ProvenanceKind::kAssumed: return "assumed";
  }
  return "assumed";
}

ProvenanceKind provenance_kind_from_string(const std::string& s) {
  if (s == "paper-anchor") return ProvenanceKind::kPaperAnchor;
  if (s == "calibrated") return ProvenanceKind::kCalibrated;
  if (s == "assumed") return ProvenanceKind::kAssumed;
  throw ConfigError({"provenance kind must be paper-anchor, calibrated or assumed, got '" + s + "'"});
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.name());
  return out;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> d;
  const auto add = [&](const std::vector<std::string>& more) { d.insert(d.end(), more.begin(), more.end()); };
  add(prefixed("gate", diagnostics(cfg.gate)));
  add(prefixed("noise", diagnostics(cfg.noise)));
  add(prefixed("spin_echo", diagnostics(cfg.spin_echo)));
  add(prefixed("readout", diagnostics(cfg.readout)));
  add(prefixed("rb", diagnostics(cfg.rb)));
  add(prefixed("rb_noise", diagnostics(cfg.rb_noise)));
  const auto keys = config_keys();
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [key, p] : cfg.provenance)
    if (!known.count(key)) d.push_back("provenance." + key + ": names no configuration parameter");
  for (const auto& key : kCalibratedKeys) {
    const auto* f = &*std::find_if(fields().begin(), fields().end(), [&](const Field& x) { return x.name() == key; });
    const bool set = parse_double(key, f->get(cfg)) != 0.0;
    const auto it = cfg.provenance.find(key);
    if (set && (it == cfg.provenance.end() || it->second.kind != ProvenanceKind::kCalibrated || it->second.note.empty()))
      d.push_back("provenance." + key + ": calibrated parameter needs a 'calibrated: <how>' entry");
  }
  return d;
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out << (section.empty() ? "" : "\n") << '[' << f.section << "]\n";
      section = f.section;
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  out << "\n[provenance]\n";
  for (const auto& [key, p] : cfg.provenance) out << key << " = " << to_string(p.kind) << ": " << p.note << '\n';
  return out.str();
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"config line " + std::to_string(e.line()) + ": " + e.message()});
  }
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  std::set<std::string> sections;
  for (const auto& f : fields()) sections.insert(f.section);
  for (const auto& [name, body] : tree) {
    if (name == "provenance") {
      for (const auto& [key, value] : body) {
        const std::string v = value.data();
        const auto colon = v.find(':');
        try {
          Provenance p;
          p.kind = provenance_kind_from_string(v.substr(0, colon));
          if (colon != std::string::npos) {
            const auto b = v.find_first_not_of(' ', colon + 1);
            p.note = b == std::string::npos ? "" : v.substr(b);
          }
          cfg.provenance[key] = p;
        } catch (const ConfigError& e) {
          errors.push_back("provenance." + key + ": " + e.diagnostics().front());
        }
      }
      continue;
    }
    if (!sections.count(name)) {
      errors.push_back("unknown section [" + name + "]");
      continue;
    }
    for (const auto& [key, value] : body) {
      const auto it = std::find_if(fields().begin(), fields().end(),
                                   [&](const Field& f) { return f.section == name && f.key == key; });
      if (it == fields().end()) {
        errors.push_back("unknown key " + name + "." + key);
        continue;
      }
      try {
        it->set(cfg, value.data());
      } catch (const ConfigError& e) {
        errors.insert(errors.end(), e.diagnostics().begin(), e.diagnostics().end());
      }
    }
  }
  // Structural and semantic problems are reported together.
  const auto invalid = validate(cfg);
  errors.insert(errors.end(), invalid.begin(), invalid.end());
  throw_if_invalid(errors);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError({e.what()});
  }
  return parse_config(text);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) { write_file(path, to_ini(cfg)); }

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : to_ini(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::map<std::string, ExperimentConfig> builtin_profiles() {
  return {{"table1-100us", table1_profile()}, {"fast-gate-3.8us", fast_gate_profile()}, {"rbm-paper", rbm_profile()}};
}

ExperimentConfig builtin_profile(const std::string& name) {
  auto all = builtin_profiles();
  const auto it = all.find(name);
  if (it == all.end()) {
    std::string known;
    for (const auto& [k, v] : all) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError({"unknown profile '" + name + "' (known: " + known + ")"});
  }
  return it->second;
}

}  // namespace iongate
