#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "dcnet/error.hpp"
#include "dcnet/scenario.hpp"

namespace dcnet {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_fail(const YAML::Node& n, const std::string& field, const std::string& msg) {
  std::ostringstream os;
  const YAML::Mark mark = n.IsDefined() ? n.Mark() : YAML::Mark::null_mark();
  if (!mark.is_null()) os << "line " << mark.line + 1 << ": ";
  os << field << ": " << msg;
  throw Error(ErrorCode::ParseError, os.str());
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void require_map(const YAML::Node& n, const std::string& field) {
  if (!n.IsMap()) parse_fail(n, field, "expected a mapping");
}

void check_keys(const YAML::Node& map, const std::string& field, std::initializer_list<const char*> allowed) {
  require_map(map, field);
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      parse_fail(kv.first, join(field, key), "unknown key");
    }
  }
}

double as_number(const YAML::Node& n, const std::string& field) {
  try {
    if (!n.IsScalar()) parse_fail(n, field, "expected a number");
    return n.as<double>();
  } catch (const YAML::Exception&) {
    parse_fail(n, field, "expected a number, got '" + n.Scalar() + "'");
  }
}

double number(const YAML::Node& map, const std::string& parent, const char* key) {
  const YAML::Node n = map[key];
  if (!n) parse_fail(map, join(parent, key), "missing required field");
  return as_number(n, join(parent, key));
}

double number_or(const YAML::Node& map, const std::string& parent, const char* key, double def) {
  const YAML::Node n = map[key];
  return n ? as_number(n, join(parent, key)) : def;
}

std::optional<double> optional_number(const YAML::Node& map, const std::string& parent, const char* key) {
  const YAML::Node n = map[key];
  if (!n) return std::nullopt;
  return as_number(n, join(parent, key));
}

std::string text(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) parse_fail(n, field, "expected a string");
  return n.Scalar();
}

bool boolean(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    parse_fail(n, field, "expected true or false");
  }
}

std::vector<double> number_list(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) parse_fail(n, field, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_number(n[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

// Coefficient lists are written highest power first.
RationalFunction transfer_function(const YAML::Node& n, const std::string& field) {
  check_keys(n, field, {"num", "den"});
  if (!n["num"] || !n["den"]) parse_fail(n, field, "needs both num and den");
  auto num = number_list(n["num"], field + ".num");
  auto den = number_list(n["den"], field + ".den");
  if (num.empty() || den.empty()) parse_fail(n, field, "coefficient lists must not be empty");
  std::reverse(num.begin(), num.end());
  std::reverse(den.begin(), den.end());
  try {
    return RationalFunction(Polynomial(num), Polynomial(den));
  } catch (const Error& e) {
    parse_fail(n, field, e.what());
  }
}

ConverterKind converter_kind(const YAML::Node& n, const std::string& field) {
  const std::string k = text(n, field);
  if (k == "boost") return ConverterKind::Boost;
  if (k == "buck") return ConverterKind::Buck;
  parse_fail(n, field, "expected 'boost' or 'buck', got '" + k + "'");
}

InnerLoopDesign inner_design(const YAML::Node& n, const std::string& field) {
  check_keys(n, field, {"omega0", "omega_tilde", "zeta1", "zeta2"});
  InnerLoopDesign d;
  d.omega0 = number_or(n, field, "omega0", d.omega0);
  d.omega_tilde = number_or(n, field, "omega_tilde", d.omega_tilde);
  d.zeta1 = number_or(n, field, "zeta1", d.zeta1);
  d.zeta2 = number_or(n, field, "zeta2", d.zeta2);
  return d;
}

WeightSet weight_set(const YAML::Node& n, const std::string& field) {
  check_keys(n, field, {"W1", "W2", "W3", "W4"});
  WeightSet w;
  RationalFunction* slots[] = {&w.W1, &w.W2, &w.W3, &w.W4};
  const char* names[] = {"W1", "W2", "W3", "W4"};
  for (int k = 0; k < 4; ++k) {
    if (!n[names[k]]) parse_fail(n, join(field, names[k]), "missing required field");
    *slots[k] = transfer_function(n[names[k]], join(field, names[k]));
  }
  return w;
}

// Explicit outer-loop fields shared by scenario `outer` sections and preset files.
void outer_fields(const YAML::Node& n, const std::string& field, OuterControllers& ctrl,
                  std::optional<WeightSet>& weights, bool require_all) {
  if (n["Kv"]) {
    ctrl.Kv = transfer_function(n["Kv"], join(field, "Kv"));
  } else if (require_all) {
    parse_fail(n, join(field, "Kv"), "missing required field");
  }
  if (n["Kr"]) {
    ctrl.Kr = transfer_function(n["Kr"], join(field, "Kr"));
  } else if (require_all) {
    parse_fail(n, join(field, "Kr"), "missing required field");
  }
  if (n["eta"]) {
    ctrl.eta = as_number(n["eta"], join(field, "eta"));
  } else if (require_all) {
    parse_fail(n, join(field, "eta"), "missing required field");
  }
  if (n["weights"]) weights = weight_set(n["weights"], join(field, "weights"));
}

OuterPreset preset_from_node(const YAML::Node& root, const std::string& name) {
  check_keys(root, "", {"name", "description", "Kv", "Kr", "eta", "weights", "inner", "nominal"});
  OuterPreset p;
  p.name = root["name"] ? text(root["name"], "name") : name;
  if (root["description"]) p.description = text(root["description"], "description");
  std::optional<WeightSet> weights;
  outer_fields(root, "", p.controllers, weights, true);
  if (weights) p.weights = *weights;
  if (root["inner"]) p.inner = inner_design(root["inner"], "inner");
  if (root["nominal"]) {
    const YAML::Node nom = root["nominal"];
    check_keys(nom, "nominal", {"L", "C", "dprime"});
    p.nominal_L = number(nom, "nominal", "L");
    p.nominal_C = number(nom, "nominal", "C");
    p.nominal_dprime = number(nom, "nominal", "dprime");
  }
  return p;
}

YAML::Node load_yaml(const std::string& text_in, const std::string& origin) {
  try {
    return YAML::Load(text_in);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << origin << ": line " << e.mark.line + 1 << ": " << e.msg;
    throw Error(ErrorCode::ParseError, os.str());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario scenario_from_node(const YAML::Node& root, const std::string& base_dir) {
  check_keys(root, "", {"name", "converters", "nominal", "inner", "outer", "shares", "load", "noise", "mode", "sim",
                        "outputs"});
  Scenario sc;
  if (root["name"]) sc.name = text(root["name"], "name");

  const YAML::Node conv = root["converters"];
  if (!conv || !conv.IsSequence() || conv.size() == 0) {
    parse_fail(conv ? conv : root, "converters", "expected a non-empty list");
  }
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const std::string f = "converters[" + std::to_string(i) + "]";
    check_keys(conv[i], f, {"kind", "L", "C", "Vg", "kc_design_L"});
    ConverterSpec c;
    c.kind = conv[i]["kind"] ? converter_kind(conv[i]["kind"], f + ".kind") : ConverterKind::Boost;
    c.L = number(conv[i], f, "L");
    c.C = number(conv[i], f, "C");
    c.Vg = number(conv[i], f, "Vg");
    c.kc_design_L = optional_number(conv[i], f, "kc_design_L");
    sc.converters.push_back(c);
  }

  const YAML::Node nom = root["nominal"];
  if (!nom) parse_fail(root, "nominal", "missing required section");
  check_keys(nom, "nominal", {"L", "C", "Vref", "dprime"});
  sc.nominal.L = number(nom, "nominal", "L");
  sc.nominal.C = number(nom, "nominal", "C");
  sc.nominal.Vref = number(nom, "nominal", "Vref");
  sc.nominal.dprime = number(nom, "nominal", "dprime");

  if (root["inner"]) sc.inner = inner_design(root["inner"], "inner");

  const YAML::Node outer = root["outer"];
  if (!outer) parse_fail(root, "outer", "missing required section");
  check_keys(outer, "outer", {"preset", "Kv", "Kr", "eta", "weights"});
  if (outer["preset"]) {
    const std::string name = text(outer["preset"], "outer.preset");
    OuterPreset p;
    try {
      p = resolve_preset(name);
    } catch (const Error& e) {
      parse_fail(outer["preset"], "outer.preset", e.what());
    }
    sc.outer.preset = name;
    sc.outer.controllers = p.controllers;
    sc.outer.weights = p.weights;
    outer_fields(outer, "outer", sc.outer.controllers, sc.outer.weights, false);
  } else {
    outer_fields(outer, "outer", sc.outer.controllers, sc.outer.weights, true);
  }

  const YAML::Node shares = root["shares"];
  if (!shares || !shares.IsSequence() || shares.size() == 0) {
    parse_fail(shares ? shares : root, "shares", "expected a non-empty list of breakpoints");
  }
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const std::string f = "shares[" + std::to_string(i) + "]";
    check_keys(shares[i], f, {"time", "gammas"});
    ShareSchedule::Breakpoint bp;
    bp.time = number_or(shares[i], f, "time", 0.0);
    if (!shares[i]["gammas"]) parse_fail(shares[i], f + ".gammas", "missing required field");
    bp.gammas = number_list(shares[i]["gammas"], f + ".gammas");
    sc.shares.breakpoints.push_back(bp);
  }

  if (const YAML::Node load = root["load"]) {
    check_keys(load, "load", {"base_power", "square_amp", "square_freq", "steps", "ripple_amp", "ripple_freq",
                              "cutoff_voltage", "pv_trace"});
    LoadProfile& L = sc.load;
    L.base_power = number_or(load, "load", "base_power", 0.0);
    L.square_amp = number_or(load, "load", "square_amp", 0.0);
    L.square_freq = number_or(load, "load", "square_freq", 0.0);
    L.ripple_amp = number_or(load, "load", "ripple_amp", 0.0);
    L.ripple_freq = number_or(load, "load", "ripple_freq", L.ripple_freq);
    L.cutoff_voltage = number_or(load, "load", "cutoff_voltage", L.cutoff_voltage);
    if (const YAML::Node steps = load["steps"]) {
      if (!steps.IsSequence()) parse_fail(steps, "load.steps", "expected a list");
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string f = "load.steps[" + std::to_string(i) + "]";
        check_keys(steps[i], f, {"time", "power"});
        L.steps.push_back({number(steps[i], f, "time"), number(steps[i], f, "power")});
      }
    }
    if (load["pv_trace"]) {
      sc.pv_trace = text(load["pv_trace"], "load.pv_trace");
      fs::path p(*sc.pv_trace);
      if (p.is_relative()) p = fs::path(base_dir) / p;
      try {
        L.pv_current = read_pv_trace(p.string());
      } catch (const Error& e) {
        parse_fail(load["pv_trace"], "load.pv_trace", e.what());
      }
    }
  }

  if (const YAML::Node noise = root["noise"]) {
    check_keys(noise, "noise", {"dc_offset", "relative_noise"});
    if (noise["dc_offset"]) sc.noise.dc_offset = number_list(noise["dc_offset"], "noise.dc_offset");
    sc.noise.relative_noise = number_or(noise, "noise", "relative_noise", 0.0);
  }

  if (const YAML::Node mode = root["mode"]) {
    check_keys(mode, "mode", {"reference", "iref"});
    if (mode["reference"]) {
      const std::string r = text(mode["reference"], "mode.reference");
      if (r == "centralized") {
        sc.sim.mode = ReferenceMode::Centralized;
      } else if (r == "decentralized") {
        sc.sim.mode = ReferenceMode::Decentralized;
      } else {
        parse_fail(mode["reference"], "mode.reference", "expected 'centralized' or 'decentralized'");
      }
    }
    sc.sim.iref = number_or(mode, "mode", "iref", 0.0);
  }

  if (const YAML::Node sim = root["sim"]) {
    check_keys(sim, "sim", {"horizon", "dt", "seed", "log_interval", "initial_voltage"});
    sc.sim.horizon = number_or(sim, "sim", "horizon", sc.sim.horizon);
    sc.sim.dt = number_or(sim, "sim", "dt", sc.sim.dt);
    sc.sim.log_interval = number_or(sim, "sim", "log_interval", sc.sim.log_interval);
    sc.sim.initial_voltage = number_or(sim, "sim", "initial_voltage", 0.0);
    if (sim["seed"]) {
      try {
        sc.noise.seed = sim["seed"].as<std::uint64_t>();
      } catch (const YAML::Exception&) {
        parse_fail(sim["seed"], "sim.seed", "expected a non-negative integer");
      }
    }
  }

  if (const YAML::Node out = root["outputs"]) {
    check_keys(out, "outputs", {"trace", "bode_points", "bode_lo", "bode_hi", "settle_time", "windows"});
    OutputOptions& o = sc.outputs;
    if (out["trace"]) o.trace = boolean(out["trace"], "outputs.trace");
    const double pts = number_or(out, "outputs", "bode_points", static_cast<double>(o.bode_points));
    if (pts < 2.0 || pts != std::floor(pts)) parse_fail(out["bode_points"], "outputs.bode_points", "expected an integer >= 2");
    o.bode_points = static_cast<std::size_t>(pts);
    o.bode_lo = number_or(out, "outputs", "bode_lo", o.bode_lo);
    o.bode_hi = number_or(out, "outputs", "bode_hi", o.bode_hi);
    o.settle_time = number_or(out, "outputs", "settle_time", o.settle_time);
    if (const YAML::Node wins = out["windows"]) {
      if (!wins.IsSequence()) parse_fail(wins, "outputs.windows", "expected a list");
      for (std::size_t i = 0; i < wins.size(); ++i) {
        const std::string f = "outputs.windows[" + std::to_string(i) + "]";
        check_keys(wins[i], f, {"name", "t0", "t1", "shares", "share_tolerance", "voltage_band", "droop_p2p",
                                "droop_tolerance", "offset_tolerance"});
        CheckWindow w;
        w.name = wins[i]["name"] ? text(wins[i]["name"], f + ".name") : "window" + std::to_string(i + 1);
        w.t0 = number(wins[i], f, "t0");
        w.t1 = number(wins[i], f, "t1");
        if (wins[i]["shares"]) w.shares = number_list(wins[i]["shares"], f + ".shares");
        w.share_tolerance = number_or(wins[i], f, "share_tolerance", w.share_tolerance);
        w.voltage_band = optional_number(wins[i], f, "voltage_band");
        w.droop_p2p = optional_number(wins[i], f, "droop_p2p");
        w.droop_tolerance = number_or(wins[i], f, "droop_tolerance", w.droop_tolerance);
        w.offset_tolerance = optional_number(wins[i], f, "offset_tolerance");
        o.windows.push_back(w);
      }
    }
  }
  return sc;
}

// ---- serialization ----

void emit_tf(YAML::Emitter& e, const RationalFunction& tf) {
  auto desc = [](const Polynomial& p) {
    std::vector<double> c = p.coeffs();
    std::reverse(c.begin(), c.end());
    return c;
  };
  e << YAML::BeginMap;
  e << YAML::Key << "num" << YAML::Value << YAML::Flow << desc(tf.num());
  e << YAML::Key << "den" << YAML::Value << YAML::Flow << desc(tf.den());
  e << YAML::EndMap;
}

void emit_weights(YAML::Emitter& e, const WeightSet& w) {
  e << YAML::BeginMap;
  e << YAML::Key << "W1" << YAML::Value;
  emit_tf(e, w.W1);
  e << YAML::Key << "W2" << YAML::Value;
  emit_tf(e, w.W2);
  e << YAML::Key << "W3" << YAML::Value;
  emit_tf(e, w.W3);
  e << YAML::Key << "W4" << YAML::Value;
  emit_tf(e, w.W4);
  e << YAML::EndMap;
}

}  // namespace

ConverterNetwork Scenario::network(bool strict) const {
  std::vector<ConverterUnit> units;
  for (const auto& c : converters) {
    ConverterUnit u;
    u.params = {c.L, c.C, c.Vg, nominal.Vref, c.kind};
    u.kc_design_L = c.kc_design_L;
    units.push_back(u);
  }
  return ConverterNetwork(std::move(units), inner, outer.controllers, shares, {nominal.L, nominal.C, nominal.dprime},
                          strict);
}

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ValidationError, msg); };
  if (converters.empty()) fail("scenario: at least one converter is required");
  for (std::size_t k = 0; k < converters.size(); ++k) {
    const auto& c = converters[k];
    ConverterParams p{c.L, c.C, c.Vg, nominal.Vref, c.kind};
    try {
      p.validate();
    } catch (const Error& e) {
      fail("converters[" + std::to_string(k) + "]: " + e.what());
    }
    if (c.C != converters.front().C) fail("converters: all units must list the same DC-link capacitance C");
    if (c.kc_design_L && !(*c.kc_design_L > 0.0)) fail("converters: kc_design_L must be > 0");
  }
  if (!(nominal.L > 0.0) || !(nominal.C > 0.0) || !(nominal.Vref > 0.0)) fail("nominal: L, C and Vref must be > 0");
  if (!(nominal.dprime > 0.0 && nominal.dprime <= 1.0)) fail("nominal: dprime must be in (0, 1]");
  inner.validate();
  outer.controllers.validate();
  if (outer.weights) outer.weights->validate();
  shares.validate();
  if (shares.converters() != converters.size()) fail("shares: one gamma per converter is required");
  load.validate();
  noise.validate();
  if (noise.dc_offset.size() > converters.size()) fail("noise: more dc_offset entries than converters");
  if (!(sim.horizon > 0.0)) fail("sim: horizon must be > 0");
  if (!(sim.dt > 0.0 && sim.dt <= 1e-4)) fail("sim: dt must be in (0, 1e-4] s");
  if (!(sim.log_interval > 0.0)) fail("sim: log_interval must be > 0");
  if (!(sim.initial_voltage >= 0.0)) fail("sim: initial_voltage must be >= 0");
  if (!(outputs.bode_lo > 0.0 && outputs.bode_hi > outputs.bode_lo)) fail("outputs: need 0 < bode_lo < bode_hi");
  if (!(outputs.settle_time >= 0.0)) fail("outputs: settle_time must be >= 0");
  for (const auto& w : outputs.windows) {
    if (!(w.t1 > w.t0)) fail("outputs.windows: '" + w.name + "' needs t1 > t0");
    if (!w.shares.empty() && w.shares.size() != converters.size()) {
      fail("outputs.windows: '" + w.name + "' shares must list one value per converter");
    }
  }
}

Scenario parse_scenario_text(const std::string& text_in, const std::string& base_dir) {
  const YAML::Node root = load_yaml(text_in, "scenario");
  if (!root.IsMap()) throw Error(ErrorCode::ParseError, "scenario: expected a mapping at the top level");
  Scenario sc = scenario_from_node(root, base_dir);
  sc.validate();
  return sc;
}

Scenario parse_scenario(const std::string& path) {
  const std::string content = read_file(path);
  const fs::path dir = fs::path(path).parent_path();
  try {
    return parse_scenario_text(content, dir.empty() ? "." : dir.string());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path + ": " + e.what());
    throw;
  }
}

std::string serialize_scenario(const Scenario& sc) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  if (!sc.name.empty()) e << YAML::Key << "name" << YAML::Value << sc.name;

  e << YAML::Key << "converters" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : sc.converters) {
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << to_string(c.kind);
    e << YAML::Key << "L" << YAML::Value << c.L;
    e << YAML::Key << "C" << YAML::Value << c.C;
    e << YAML::Key << "Vg" << YAML::Value << c.Vg;
    if (c.kc_design_L) e << YAML::Key << "kc_design_L" << YAML::Value << *c.kc_design_L;
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;

  e << YAML::Key << "nominal" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "L" << YAML::Value << sc.nominal.L;
  e << YAML::Key << "C" << YAML::Value << sc.nominal.C;
  e << YAML::Key << "Vref" << YAML::Value << sc.nominal.Vref;
  e << YAML::Key << "dprime" << YAML::Value << sc.nominal.dprime;
  e << YAML::EndMap;

  e << YAML::Key << "inner" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "omega0" << YAML::Value << sc.inner.omega0;
  e << YAML::Key << "omega_tilde" << YAML::Value << sc.inner.omega_tilde;
  e << YAML::Key << "zeta1" << YAML::Value << sc.inner.zeta1;
  e << YAML::Key << "zeta2" << YAML::Value << sc.inner.zeta2;
  e << YAML::EndMap;

  e << YAML::Key << "outer" << YAML::Value << YAML::BeginMap;
  std::optional<OuterPreset> base;
  if (sc.outer.preset) {
    base = resolve_preset(*sc.outer.preset);
    e << YAML::Key << "preset" << YAML::Value << *sc.outer.preset;
  }
  const auto& ctrl = sc.outer.controllers;
  if (!base || !(base->controllers.Kv == ctrl.Kv)) {
    e << YAML::Key << "Kv" << YAML::Value;
    emit_tf(e, ctrl.Kv);
  }
  if (!base || !(base->controllers.Kr == ctrl.Kr)) {
    e << YAML::Key << "Kr" << YAML::Value;
    emit_tf(e, ctrl.Kr);
  }
  if (!base || base->controllers.eta != ctrl.eta) e << YAML::Key << "eta" << YAML::Value << ctrl.eta;
  if (sc.outer.weights && (!base || !(base->weights == *sc.outer.weights))) {
    e << YAML::Key << "weights" << YAML::Value;
    emit_weights(e, *sc.outer.weights);
  }
  e << YAML::EndMap;

  e << YAML::Key << "shares" << YAML::Value << YAML::BeginSeq;
  for (const auto& bp : sc.shares.breakpoints) {
    e << YAML::Flow << YAML::BeginMap << YAML::Key << "time" << YAML::Value << bp.time << YAML::Key << "gammas"
      << YAML::Value << YAML::Flow << bp.gammas << YAML::EndMap;
  }
  e << YAML::EndSeq;

  const LoadProfile& L = sc.load;
  e << YAML::Key << "load" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "base_power" << YAML::Value << L.base_power;
  e << YAML::Key << "square_amp" << YAML::Value << L.square_amp;
  e << YAML::Key << "square_freq" << YAML::Value << L.square_freq;
  if (!L.steps.empty()) {
    e << YAML::Key << "steps" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : L.steps) {
      e << YAML::Flow << YAML::BeginMap << YAML::Key << "time" << YAML::Value << s.time << YAML::Key << "power"
        << YAML::Value << s.power << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::Key << "ripple_amp" << YAML::Value << L.ripple_amp;
  e << YAML::Key << "ripple_freq" << YAML::Value << L.ripple_freq;
  e << YAML::Key << "cutoff_voltage" << YAML::Value << L.cutoff_voltage;
  if (sc.pv_trace) e << YAML::Key << "pv_trace" << YAML::Value << *sc.pv_trace;
  e << YAML::EndMap;

  e << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dc_offset" << YAML::Value << YAML::Flow << sc.noise.dc_offset;
  e << YAML::Key << "relative_noise" << YAML::Value << sc.noise.relative_noise;
  e << YAML::EndMap;

  e << YAML::Key << "mode" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "reference" << YAML::Value << to_string(sc.sim.mode);
  e << YAML::Key << "iref" << YAML::Value << sc.sim.iref;
  e << YAML::EndMap;

  e << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "horizon" << YAML::Value << sc.sim.horizon;
  e << YAML::Key << "dt" << YAML::Value << sc.sim.dt;
  e << YAML::Key << "seed" << YAML::Value << sc.noise.seed;
  e << YAML::Key << "log_interval" << YAML::Value << sc.sim.log_interval;
  e << YAML::Key << "initial_voltage" << YAML::Value << sc.sim.initial_voltage;
  e << YAML::EndMap;

  const OutputOptions& o = sc.outputs;
  e << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "trace" << YAML::Value << o.trace;
  e << YAML::Key << "bode_points" << YAML::Value << o.bode_points;
  e << YAML::Key << "bode_lo" << YAML::Value << o.bode_lo;
  e << YAML::Key << "bode_hi" << YAML::Value << o.bode_hi;
  e << YAML::Key << "settle_time" << YAML::Value << o.settle_time;
  if (!o.windows.empty()) {
    e << YAML::Key << "windows" << YAML::Value << YAML::BeginSeq;
    for (const auto& w : o.windows) {
      e << YAML::BeginMap;
      e << YAML::Key << "name" << YAML::Value << w.name;
      e << YAML::Key << "t0" << YAML::Value << w.t0;
      e << YAML::Key << "t1" << YAML::Value << w.t1;
      if (!w.shares.empty()) e << YAML::Key << "shares" << YAML::Value << YAML::Flow << w.shares;
      e << YAML::Key << "share_tolerance" << YAML::Value << w.share_tolerance;
      if (w.voltage_band) e << YAML::Key << "voltage_band" << YAML::Value << *w.voltage_band;
      if (w.droop_p2p) e << YAML::Key << "droop_p2p" << YAML::Value << *w.droop_p2p;
      e << YAML::Key << "droop_tolerance" << YAML::Value << w.droop_tolerance;
      if (w.offset_tolerance) e << YAML::Key << "offset_tolerance" << YAML::Value << *w.offset_tolerance;
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

OuterPreset read_preset_file(const std::string& path) {
  const YAML::Node root = load_yaml(read_file(path), path);
  const std::string stem = fs::path(path).stem().string();
  try {
    OuterPreset p = preset_from_node(root, stem);
    p.controllers.validate();
    p.weights.validate();
    return p;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path + ": " + e.what());
    throw;
  }
}

namespace {

std::optional<fs::path> preset_dir() {
  const char* dir = std::getenv("DCNET_PRESET_DIR");
  if (!dir || !*dir) return std::nullopt;
  return fs::path(dir);
}

}  // namespace

OuterPreset resolve_preset(const std::string& name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  if (const auto dir = preset_dir()) {
    const fs::path file = *dir / (name + ".yaml");
    if (fs::exists(file)) return read_preset_file(file.string());
  }
  throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

std::vector<std::string> list_presets() {
  std::vector<std::string> out;
  for (const auto& p : builtin_presets()) out.push_back(p.name);
  if (const auto dir = preset_dir(); dir && fs::is_directory(*dir)) {
    std::vector<std::string> extra;
    for (const auto& entry : fs::directory_iterator(*dir)) {
      if (entry.path().extension() == ".yaml") extra.push_back(entry.path().stem().string());
    }
    std::sort(extra.begin(), extra.end());
    for (auto& n : extra) {
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
    }
  }
  return out;
}

}  // namespace dcnet
