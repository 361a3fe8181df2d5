#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "dcnet/error.hpp"
#include "dcnet/scenario.hpp"

namespace dcnet {

namespace fs = std::filesystem;
using cd = std::complex<double>;

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

bool RunResult::all_passed() const {
  return analysis.all_passed() && std::all_of(simulation_checks.begin(), simulation_checks.end(),
                                              [](const CheckResult& c) { return c.passed; });
}

namespace {

CheckResult at_most(std::string name, double value, double limit, std::string detail = {}) {
  return {std::move(name), value, limit, "<=", std::isfinite(value) && value <= limit, std::move(detail)};
}

CheckResult failed(std::string name, std::string detail) {
  return {std::move(name), std::nan(""), 0.0, "error", false, std::move(detail)};
}

double rel_err(cd a, cd b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double nominal_current(const Scenario& sc) {
  if (sc.sim.mode == ReferenceMode::Decentralized) return sc.sim.iref;
  return sc.load.base_power / sc.nominal.Vref;
}

void equivalence_checks(const Scenario& sc, const ConverterNetwork& net, std::vector<CheckResult>& out) {
  for (const auto& bp : sc.shares.breakpoints) {
    const std::string name = "equivalence at t=" + fmt(bp.time);
    double sum = 0.0;
    for (double g : bp.gammas) sum += g;
    if (std::abs(sum - 1.0) > 1e-9) {
      out.push_back(failed(name, "shares sum to " + fmt(sum)));
      continue;
    }
    try {
      const ClosedLoopSet eq = build_closed_loop(net.shaped(), net.voltage_plant(), net.nominal().dprime,
                                                 net.controllers());
      double worst = 0.0;
      for (double w : logspace(1e-2, 1e6, 200)) {
        const NetworkResponse r = network_response(net, bp.gammas, w);
        const cd ti = eq.T_irefV.at_frequency(w);
        worst = std::max(worst, rel_err(r.voltage[0], eq.T_VrefV.at_frequency(w)));
        worst = std::max(worst, rel_err(r.voltage[1], ti));
        worst = std::max(worst, rel_err(r.voltage[2], -(ti + eq.GvS.at_frequency(w))));
      }
      out.push_back(at_most(name, worst, 1e-8, "max rel. error, 200 points in [1e-2, 1e6] rad/s"));
    } catch (const Error& e) {
      out.push_back(failed(name, e.what()));
    }
  }
}

}  // namespace

VerifyReport verify_scenario(const Scenario& sc) {
  VerifyReport rep;
  auto& out = rep.checks;
  const ConverterNetwork net = sc.network(false);
  const auto& ctrl = sc.outer.controllers;
  const double Dp = sc.nominal.dprime;

  for (std::size_t k = 0; k < net.size(); ++k) {
    const double err = inner_closure_error(net.inner_controller(k), net.units()[k].params.L, net.inner());
    out.push_back(at_most("inner closure, converter " + std::to_string(k + 1), err, 1e-9,
                          "max rel. error to the shaped plant"));
  }

  std::optional<ClosedLoopSet> cl;
  try {
    cl = build_closed_loop(net.shaped(), net.voltage_plant(), Dp, ctrl);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : cl->characteristic.roots()) worst = std::max(worst, r.real());
    out.push_back({"closed loop stable", worst, 0.0, "<", true, "largest closed-loop pole real part"});
  } catch (const Error& e) {
    out.push_back(failed("closed loop stable", e.what()));
  }

  equivalence_checks(sc, net, out);

  const DcGain kv = dc_gain(ctrl.Kv);
  const DcGain kr = dc_gain(ctrl.Kr);
  if (cl && !kv.infinite && !kr.infinite) {
    const double vg = std::abs(kv.value + ctrl.eta * kr.value);
    const double t_v = dc_gain(cl->T_VrefV).value;
    out.push_back(at_most("DC gain |T_VrefV(0)| = 1", std::abs(std::abs(t_v) - 1.0), 1e-9, "|T_VrefV(0)| = " + fmt(t_v)));
    const double t_i = std::abs(dc_gain(cl->T_irefV).value);
    const double t_i_ref = std::abs(kr.value) / vg;
    out.push_back(at_most("DC gain |T_irefV(0)| = |Kr|/|Kv+eta Kr|",
                          t_i_ref == 0.0 ? t_i : std::abs(t_i - t_i_ref) / t_i_ref, 1e-9,
                          "|T_irefV(0)| = " + fmt(t_i)));
    const double g_s = std::abs(dc_gain(cl->GvS).value);
    const double g_s_ref = 1.0 / (Dp * vg);
    out.push_back(at_most("DC gain |GvS(0)| = 1/(D'|Kv+eta Kr|)", std::abs(g_s - g_s_ref) / g_s_ref, 1e-9,
                          "|GvS(0)| = " + fmt(g_s)));
  }

  const SharingTerms terms = sharing_terms(net);
  const DcGain t1 = dc_gain(terms.T1);
  const DcGain t2 = dc_gain(terms.T2);
  out.push_back(at_most("|T1(0)| <= 1", t1.infinite ? INFINITY : std::abs(t1.value), 1.0));
  out.push_back(at_most("|T2(0)| <= 1", t2.infinite ? INFINITY : std::abs(t2.value), 1.0));

  const double i0 = nominal_current(sc);
  const double bc = tracking_error_bounds(ctrl, Dp, i0, i0, true);
  const double bd = tracking_error_bounds(ctrl, Dp, i0, i0, false);
  out.push_back({"tracking bound, centralized", bc, 0.0, "finite", std::isfinite(bc),
                 "V at iref = iload = " + fmt(i0) + " A"});
  out.push_back({"tracking bound, decentralized", bd, 0.0, "finite", std::isfinite(bd),
                 "V at iref = iload = " + fmt(i0) + " A"});

  if (sc.outer.weights) {
    try {
      const GeneralizedPlant P = build_generalized_plant(net.shaped(), net.voltage_plant(), Dp, ctrl.eta,
                                                         *sc.outer.weights);
      const ControllerEvaluation ev = evaluate_controller(P, ctrl);
      out.push_back({"weighted closed-loop norm", ev.closed_weighted_norm, 0.0, "finite, stable",
                     ev.stable && std::isfinite(ev.closed_weighted_norm), "peak at " + fmt(ev.peak_omega) + " rad/s"});
    } catch (const Error& e) {
      out.push_back(failed("weighted closed-loop norm", e.what()));
    }
  }
  return rep;
}

namespace {

void window_checks(const Scenario& sc, const ConverterNetwork& net, const ClosedLoopSet* cl, const CheckWindow& w,
                   const SteadyStateMetrics& met, std::vector<CheckResult>& out) {
  const std::string tag = " [" + w.name + "]";
  const double Vref = sc.nominal.Vref;
  const auto& ctrl = sc.outer.controllers;
  const std::size_t m = net.size();

  if (!w.shares.empty()) {
    double worst = 0.0;
    std::string got;
    for (std::size_t k = 0; k < m; ++k) {
      worst = std::max(worst, std::abs(met.share_ratios[k] - w.shares[k]));
      got += (k ? ", " : "") + fmt(met.share_ratios[k]);
    }
    out.push_back(at_most("share ratios" + tag, worst, w.share_tolerance, "measured (" + got + ")"));
  }

  // Sharing-bound soundness for every pair, using the shares in force at the
  // window start and the run's DC voltage error.
  {
    const double t_start = w.t0;
    const double e1_dc = std::abs(met.e1_mean);
    const double sigma = sc.noise.relative_noise * std::abs(met.V_mean);
    double worst = 0.0;
    std::string detail;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t l = k + 1; l < m; ++l) {
        const double bound = sharing_bound(net, k, l, e1_dc, t_start);
        const double per_volt = e1_dc > 0.0 ? bound / e1_dc : sharing_bound(net, k, l, 1.0, t_start);
        const double allowed = bound + per_volt * 3.0 * sigma;
        const double gap = met.scaled_current_dc_gap[k][l];
        const double ratio = allowed > 0.0 ? gap / allowed : (gap == 0.0 ? 0.0 : INFINITY);
        if (ratio >= worst) {
          worst = ratio;
          detail = "pair (" + std::to_string(k + 1) + "," + std::to_string(l + 1) + "): gap " + fmt(gap) +
                   " A, bound " + fmt(allowed) + " A";
        }
      }
    }
    if (m > 1) out.push_back(at_most("sharing bound" + tag, worst, 1.0, detail));
  }

  if (sc.sim.mode == ReferenceMode::Centralized) {
    if (w.voltage_band) {
      out.push_back(at_most("voltage band" + tag, met.V_max_deviation_settled / Vref, *w.voltage_band,
                            "worst |V - Vref| " + fmt(met.V_max_deviation_settled) + " V outside settle intervals"));
    }
    const double bound = tracking_error_bounds(ctrl, sc.nominal.dprime, met.iref_mean, met.net_load_mean, true);
    out.push_back(at_most("tracking error, centralized" + tag, std::abs(met.e1_mean), bound,
                          "|mean e1| in V against the DC bound"));
  } else {
    if (w.droop_p2p) {
      const double dev = std::abs(met.V_p2p_settled - *w.droop_p2p) / *w.droop_p2p;
      out.push_back(at_most("droop peak-to-peak" + tag, dev, w.droop_tolerance,
                            "settled V p2p " + fmt(met.V_p2p_settled) + " V, target " + fmt(*w.droop_p2p) + " V"));
    }
    if (w.offset_tolerance && cl) {
      const double ti0 = dc_gain(cl->T_irefV).value;
      const double predicted = ti0 * (met.iref_mean - met.net_load_mean);
      const double measured = met.V_mean - Vref;
      const double dev = predicted != 0.0 ? std::abs(measured - predicted) / std::abs(predicted) : std::abs(measured);
      out.push_back(at_most("droop DC offset" + tag, dev, *w.offset_tolerance,
                            "mean V - Vref " + fmt(measured) + " V, predicted " + fmt(predicted) + " V"));
    }
  }
}

void write_bode(const ClosedLoopSet& cl, const OutputOptions& o, const fs::path& file) {
  std::ofstream os(file);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  os << "omega,mag_T_VrefV,phase_T_VrefV,mag_T_irefV,phase_T_irefV,mag_GvS,phase_GvS,mag_S,phase_S\n";
  const RationalFunction* tfs[] = {&cl.T_VrefV, &cl.T_irefV, &cl.GvS, &cl.S};
  char buf[40];
  for (double w : logspace(o.bode_lo, o.bode_hi, o.bode_points)) {
    std::snprintf(buf, sizeof buf, "%.9g", w);
    os << buf;
    for (const auto* tf : tfs) {
      const cd v = tf->at_frequency(w);
      std::snprintf(buf, sizeof buf, ",%.9g,%.9g", std::abs(v), std::arg(v) * 180.0 / std::numbers::pi);
      os << buf;
    }
    os << '\n';
  }
}

nlohmann::json checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr)},
                   {"limit", c.limit},
                   {"relation", c.relation},
                   {"passed", c.passed},
                   {"detail", c.detail}});
  }
  return arr;
}

}  // namespace

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": ";
    if (c.relation == "error") {
      os << c.detail;
    } else {
      os << fmt(c.value);
      if (c.relation == "<=" || c.relation == "<") os << ' ' << c.relation << ' ' << fmt(c.limit);
      if (!c.detail.empty()) os << "  (" << c.detail << ')';
    }
    os << '\n';
  }
  return os.str();
}

RunResult run_scenario(const Scenario& sc, const std::string& out_dir) {
  RunResult res;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  res.analysis = verify_scenario(sc);
  const ConverterNetwork net = sc.network(false);

  std::optional<ClosedLoopSet> cl;
  try {
    cl = build_closed_loop(net.shaped(), net.voltage_plant(), sc.nominal.dprime, sc.outer.controllers);
  } catch (const Error&) {
  }
  if (cl) {
    write_bode(*cl, sc.outputs, dir / "bode.csv");
    res.files.push_back((dir / "bode.csv").string());
  }

  nlohmann::json windows = nlohmann::json::array();
  try {
    const ConverterNetwork strict_net = sc.network(true);
    NoiseModel noise = sc.noise;
    const SimTrace tr = simulate(strict_net, sc.load, noise, sc.sim);
    if (sc.outputs.trace) {
      std::ofstream os(dir / "trace.csv");
      if (!os) throw Error(ErrorCode::IoError, "cannot write " + (dir / "trace.csv").string());
      write_trace_csv(tr, os);
      res.files.push_back((dir / "trace.csv").string());
    }
    for (const auto& w : sc.outputs.windows) {
      try {
        const SteadyStateMetrics met =
            steady_state_metrics(tr, sc.load, {w.t0, w.t1, sc.nominal.Vref, sc.outputs.settle_time});
        window_checks(sc, strict_net, cl ? &*cl : nullptr, w, met, res.simulation_checks);
        res.windows.emplace_back(w, met);
        windows.push_back({{"name", w.name},
                           {"t0", w.t0},
                           {"t1", w.t1},
                           {"V_mean", met.V_mean},
                           {"V_p2p", met.V_p2p},
                           {"V_p2p_settled", met.V_p2p_settled},
                           {"V_max_deviation_settled", met.V_max_deviation_settled},
                           {"e1_mean", met.e1_mean},
                           {"abs_e1_mean", met.abs_e1_mean},
                           {"iref_mean", met.iref_mean},
                           {"net_load_mean", met.net_load_mean},
                           {"share_ratios", met.share_ratios},
                           {"scaled_current_gap", met.scaled_current_gap},
                           {"scaled_current_dc_gap", met.scaled_current_dc_gap}});
      } catch (const Error& e) {
        res.simulation_checks.push_back(failed("metrics [" + w.name + "]", e.what()));
      }
    }
  } catch (const Error& e) {
    res.simulation_checks.push_back(failed("simulation", e.what()));
  }

  nlohmann::json doc = {{"scenario", sc.name},
                        {"mode", to_string(sc.sim.mode)},
                        {"iref", sc.sim.iref},
                        {"dt", sc.sim.dt},
                        {"horizon", sc.sim.horizon},
                        {"seed", sc.noise.seed},
                        {"analysis", checks_json(res.analysis.checks)},
                        {"simulation", checks_json(res.simulation_checks)},
                        {"windows", windows},
                        {"passed", res.all_passed()}};
  {
    std::ofstream os(dir / "metrics.json");
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + (dir / "metrics.json").string());
    os << doc.dump(2) << '\n';
    res.files.push_back((dir / "metrics.json").string());
  }
  {
    std::ofstream os(dir / "report.txt");
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + (dir / "report.txt").string());
    os << "scenario: " << (sc.name.empty() ? "(unnamed)" : sc.name) << "\nmode: " << to_string(sc.sim.mode);
    if (sc.sim.mode == ReferenceMode::Decentralized) os << " (iref " << fmt(sc.sim.iref) << " A)";
    os << "\n\nanalysis\n" << format_checks(res.analysis.checks) << "\nsimulation\n"
       << format_checks(res.simulation_checks) << "\nresult: " << (res.all_passed() ? "PASS" : "FAIL") << '\n';
    res.files.push_back((dir / "report.txt").string());
  }
  return res;
}

}  // namespace dcnet
