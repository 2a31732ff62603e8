#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iongate/gate.hpp"
#include "iongate/noise.hpp"
#include "iongate/rb.hpp"
#include "iongate/readout.hpp"
#include "iongate/spinecho.hpp"

namespace iongate {

enum class ProvenanceKind { kPaperAnchor, kCalibrated, kAssumed };

std::string to_string(ProvenanceKind kind);
ProvenanceKind provenance_kind_from_string(const std::string& s);

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::kAssumed;
  std::string note;
};

// Apparatus constants carried as metadata.
struct Apparatus {
  double qubit_freq = 3.226e9;       // Hz
  double magnetic_field = 0.196e-3;  // T
  double breathing_freq = 0.686e6;   // Hz
  double micromotion_freq = 30.0e6;  // Hz
  double crosstalk_rabi_off = 0.2e3;  // Omega'/2pi at the null, Hz
  double crosstalk_rabi_on = 36.5e3;  // Omega/2pi, Hz
};

struct ExperimentConfig {
  std::string profile;  // informational
  GateConfig gate;
  NoiseParams noise;
  SpinEchoConfig spin_echo;
  ReadoutModel readout;
  RbPlan rb;
  NoiseModel1Q rb_noise;
  Apparatus apparatus;
  std::uint64_t seed = 1;
  std::map<std::string, Provenance> provenance;  // "section.key" -> tag
};

// Every nested invariant plus the provenance rules, exhaustively.
std::vector<std::string> validate(const ExperimentConfig& cfg);

// Human-editable INI: one section per component plus [provenance].  Unknown
// sections or keys are rejected.
std::string to_ini(const ExperimentConfig& cfg);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Every "section.key" understood by the parser.
std::vector<std::string> config_keys();

// 16 hex digits of the FNV-1a hash of to_ini(cfg).
std::string config_hash(const ExperimentConfig& cfg);

std::map<std::string, ExperimentConfig> builtin_profiles();
ExperimentConfig builtin_profile(const std::string& name);

}  // namespace iongate
