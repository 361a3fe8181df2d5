#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcnet/network.hpp"
#include "dcnet/presets.hpp"
#include "dcnet/simulation.hpp"

namespace dcnet {

/// One steady-state window evaluated after a run, with the optional checks
/// attached to it.
struct CheckWindow {
  std::string name;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> shares;  ///< expected share ratios, empty = unchecked
  double share_tolerance = 0.02;
  std::optional<double> voltage_band;    ///< fraction of Vref, centralized runs
  std::optional<double> droop_p2p;       ///< V, decentralized runs
  double droop_tolerance = 0.25;         ///< relative
  std::optional<double> offset_tolerance;  ///< relative, decentralized runs

  bool operator==(const CheckWindow&) const = default;
};

struct OutputOptions {
  bool trace = true;
  std::size_t bode_points = 400;
  double bode_lo = 1e-2;
  double bode_hi = 1e6;
  double settle_time = 0.1;
  std::vector<CheckWindow> windows;

  bool operator==(const OutputOptions&) const = default;
};

struct ConverterSpec {
  ConverterKind kind = ConverterKind::Boost;
  double L = 0.0;
  double C = 0.0;
  double Vg = 0.0;
  std::optional<double> kc_design_L;

  bool operator==(const ConverterSpec&) const = default;
};

struct OuterSpec {
  std::optional<std::string> preset;  ///< set when the controllers came from a preset
  OuterControllers controllers;
  std::optional<WeightSet> weights;

  bool operator==(const OuterSpec&) const = default;
};

struct NominalSpec {
  double L = 0.0;
  double C = 0.0;
  double Vref = 0.0;
  double dprime = 1.0;

  bool operator==(const NominalSpec&) const = default;
};

/// Everything a run needs, as read from a scenario file. `pv_trace` keeps
/// the path as written; `load.pv_current` holds the samples read from it.
struct Scenario {
  std::string name;
  std::vector<ConverterSpec> converters;
  NominalSpec nominal;
  InnerLoopDesign inner;
  OuterSpec outer;
  ShareSchedule shares;
  LoadProfile load;
  std::optional<std::string> pv_trace;
  NoiseModel noise;
  SimulationOptions sim;
  OutputOptions outputs;

  /// Strict network (validated, inner loops checked).
  ConverterNetwork network(bool strict = true) const;
  /// Module-level invariants; throws ValidationError/ShareSumViolation.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

/// Parses a scenario file. `base_dir` resolves a relative pv_trace path and
/// defaults to the file's directory. Throws ParseError (with line and field)
/// for malformed documents or unknown keys, and the module's validation
/// error for invariant violations.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& base_dir = ".");

/// YAML text that parses back into an equal Scenario.
std::string serialize_scenario(const Scenario& sc);

/// Preset lookup: built-ins first, then `<name>.yaml` in the directory named
/// by DCNET_PRESET_DIR. Throws ConfigError if neither has it.
OuterPreset resolve_preset(const std::string& name);
/// Names of the built-in presets followed by those found in DCNET_PRESET_DIR.
std::vector<std::string> list_presets();
/// Reads a preset file: the same mapping as a scenario's `outer` section,
/// plus optional `description`, `inner` and `nominal`.
OuterPreset read_preset_file(const std::string& path);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;  ///< how value compares to limit, e.g. "<=" or "within"
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Frequency-domain checks only: inner closure, multi-converter equivalence at
/// every share breakpoint, DC-gain identities, sharing-term magnitudes,
/// tracking bounds and, when weights exist, the weighted closed-loop norm.
VerifyReport verify_scenario(const Scenario& sc);

struct RunResult {
  VerifyReport analysis;
  std::vector<CheckResult> simulation_checks;
  std::vector<std::pair<CheckWindow, SteadyStateMetrics>> windows;
  std::vector<std::string> files;
  bool all_passed() const;
};

/// Analysis, then simulation, then per-window metrics and checks. Writes
/// trace.csv, metrics.json, bode.csv and report.txt into out_dir.
RunResult run_scenario(const Scenario& sc, const std::string& out_dir);

/// Human-readable check table.
std::string format_checks(const std::vector<CheckResult>& checks);

}  // namespace dcnet
