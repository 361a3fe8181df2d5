#include "dcnet/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "dcnet/error.hpp"
#include "dcnet/state_space.hpp"

namespace dcnet {

// ---- load and noise -----------------------------------------------------

void LoadProfile::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ValidationError, "LoadProfile: " + msg); };
  if (!std::isfinite(base_power) || !std::isfinite(square_amp)) fail("powers must be finite");
  if (!(square_freq >= 0.0)) fail("square_freq must be >= 0");
  if (base_power - std::abs(square_amp) < 0.0) fail("base_power - |square_amp| must be >= 0");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i].power >= 0.0)) fail("step powers must be >= 0");
    if (i > 0 && !(steps[i].time > steps[i - 1].time)) fail("step times must be strictly increasing");
  }
  if (!(cutoff_voltage > 0.0)) fail("cutoff_voltage must be > 0");
  if (!(ripple_freq > 0.0) || !std::isfinite(ripple_amp)) fail("ripple must have finite amplitude and freq > 0");
  for (std::size_t i = 1; i < pv_current.size(); ++i) {
    if (!(pv_current[i].time > pv_current[i - 1].time)) fail("pv_current times must be strictly increasing");
  }
}

double LoadProfile::power(double t) const {
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (t >= it->time) return it->power;
  }
  double p = base_power;
  if (square_freq > 0.0 && square_amp != 0.0) {
    const double phase = t * square_freq - std::floor(t * square_freq);
    p += phase < 0.5 ? square_amp : -square_amp;
  }
  return p;
}

double LoadProfile::current(double t, double V) const { return current_at_power(power(t), t, V); }

double LoadProfile::current_at_power(double p, double t, double V) const {
  double i = V >= cutoff_voltage ? p / V : p * V / (cutoff_voltage * cutoff_voltage);
  if (ripple_amp != 0.0) i += ripple_amp * std::sin(2.0 * std::numbers::pi * ripple_freq * t);
  return i;
}

double LoadProfile::pv(double t) const {
  if (pv_current.empty()) return 0.0;
  if (t <= pv_current.front().time) return pv_current.front().current;
  if (t >= pv_current.back().time) return pv_current.back().current;
  const auto hi = std::upper_bound(pv_current.begin(), pv_current.end(), t,
                                   [](double v, const PvSample& s) { return v < s.time; });
  const auto lo = hi - 1;
  const double w = (t - lo->time) / (hi->time - lo->time);
  return lo->current + w * (hi->current - lo->current);
}

std::vector<double> LoadProfile::edges(double t0, double t1) const {
  std::vector<double> out;
  const double first_step = steps.empty() ? std::numeric_limits<double>::infinity() : steps.front().time;
  if (square_freq > 0.0 && square_amp != 0.0) {
    const double half = 0.5 / square_freq;
    for (double k = std::ceil(t0 / half); k * half <= std::min(t1, first_step); k += 1.0) {
      if (k > 0.0) out.push_back(k * half);
    }
  }
  for (const auto& s : steps) {
    if (s.time >= t0 && s.time <= t1) out.push_back(s.time);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void NoiseModel::validate() const {
  for (double o : dc_offset) {
    if (!std::isfinite(o)) throw Error(ErrorCode::ValidationError, "NoiseModel: dc_offset must be finite");
  }
  if (!(relative_noise >= 0.0) || !std::isfinite(relative_noise)) {
    throw Error(ErrorCode::ValidationError, "NoiseModel: relative_noise must be finite and >= 0");
  }
}

const char* to_string(ReferenceMode mode) noexcept {
  return mode == ReferenceMode::Centralized ? "centralized" : "decentralized";
}

std::vector<PvSample> read_pv_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open PV trace '" + path + "'");
  std::vector<PvSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    PvSample s;
    std::string extra;
    if (!(ls >> s.time >> s.current) || (ls >> extra)) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected two numeric columns");
    }
    if (!out.empty() && !(s.time > out.back().time)) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": times must be strictly increasing");
    }
    out.push_back(s);
  }
  return out;
}

// ---- simulator -----------------------------------------------------------

namespace {

struct Siso {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
  Eigen::Index n = 0;
};

Siso siso(const RationalFunction& tf) {
  const StateSpaceModel ss = realize(tf);
  Siso out;
  out.A = ss.A;
  out.B = ss.B.col(0);
  out.C = ss.C.row(0);
  out.D = ss.D(0, 0);
  out.n = ss.states();
  return out;
}

constexpr double kMinDutyVoltage = 1e-3;

struct UnitModel {
  ConverterParams params;
  Siso kc, kv, kr;
  Eigen::Index offset = 0;  // iL, then kc, kv, kr states
};

struct UnitSignals {
  double e1 = 0.0, e2 = 0.0, duty = 0.0, dprime = 1.0, i_out = 0.0;
  bool saturated = false;
};

struct LinkSignals {
  double iload = 0.0, ipv = 0.0, iref = 0.0;
};

class Plant {
 public:
  Plant(const ConverterNetwork& net, const LoadProfile& load, const SimulationOptions& opts)
      : net_(net), load_(load), opts_(opts) {
    const double m = static_cast<double>(net.size());
    Eigen::Index offset = 1;
    for (std::size_t k = 0; k < net.size(); ++k) {
      UnitModel u;
      u.params = net.units()[k].params;
      u.kc = siso(net.inner_controller(k));
      u.kv = siso((1.0 / m) * net.controllers().Kv);
      u.kr = siso(net.controllers().Kr);
      u.offset = offset;
      offset += 1 + u.kc.n + u.kv.n + u.kr.n;
      units_.push_back(std::move(u));
    }
    states_ = offset;
    capacitance_ = units_.front().params.C;
    measurement_.assign(net.size(), 0.0);
  }

  Eigen::Index states() const noexcept { return states_; }
  double capacitance() const noexcept { return capacitance_; }
  Eigen::Index unit_offset(std::size_t k) const { return units_[k].offset; }
  /// Additive sensor error per unit, held over the current step.
  std::vector<double>& measurement_error() noexcept { return measurement_; }

  /// Piecewise-constant inputs (power demand, shares) are sampled at `held`,
  /// one time per step, so a load edge never falls between RK4 stages.
  void rhs(double t, double held, const Eigen::VectorXd& x, Eigen::VectorXd& dx, LinkSignals* link = nullptr,
           std::vector<UnitSignals>* sig = nullptr) const {
    const double V = x[0];
    const double ipv = load_.pv(t);
    const double iload = load_.current_at_power(load_.power(held), t, V);
    const double iref = opts_.mode == ReferenceMode::Centralized ? iload - ipv : opts_.iref;
    const auto& gammas = net_.share().gammas_at(held);
    const double eta = net_.controllers().eta;

    double i_total = 0.0;
    for (std::size_t k = 0; k < units_.size(); ++k) {
      const UnitModel& u = units_[k];
      const ConverterParams& p = u.params;
      const Eigen::Index o = u.offset;
      const double iL = x[o];
      const auto xc = x.segment(o + 1, u.kc.n);
      const auto xv = x.segment(o + 1 + u.kc.n, u.kv.n);
      const auto xr = x.segment(o + 1 + u.kc.n + u.kv.n, u.kr.n);

      const double Vm = V + measurement_[k];
      const double e1 = p.Vref - Vm;
      const double yv = u.kv.C.dot(xv) + u.kv.D * e1;
      const double share_ref = gammas[k] * (iref + eta * e1);
      const double yr_free = u.kr.C.dot(xr) + u.kr.D * share_ref;
      const double kc_free = u.kc.C.dot(xc);

      UnitSignals s;
      s.e1 = e1;
      DutyCommand cmd;
      double i_meas = 0.0;
      if (p.kind == ConverterKind::Boost) {
        // u_tilde depends on d' through the measured current d' iL fed to Kr's
        // direct term; solve that scalar loop exactly before clamping.
        const double alpha = kc_free + u.kc.D * (yv + yr_free - iL);
        const double coupling = u.kc.D * u.kr.D * iL;
        double dp = 1.0;
        if (Vm >= kMinDutyVoltage) {
          const double den = Vm - coupling;
          if (den > 0.0) {
            dp = std::clamp((p.Vg - alpha) / den, 0.0, 1.0);
          } else {
            dp = p.Vg - alpha + coupling > Vm ? 1.0 : 0.0;
          }
        }
        const double u_tilde = alpha - coupling * dp;
        cmd = duty_from_control(u_tilde, {iL, Vm}, p);
        i_meas = cmd.dprime * iL;
      } else {
        i_meas = iL;
        const double u_hat = yv + yr_free - u.kr.D * i_meas;
        cmd = duty_from_control(kc_free + u.kc.D * (u_hat - iL), {iL, Vm}, p);
      }
      s.duty = cmd.duty;
      s.dprime = cmd.dprime;
      s.saturated = cmd.saturated;
      s.e2 = share_ref - i_meas;
      s.i_out = i_meas;
      const double u_hat = yv + yr_free - u.kr.D * i_meas;
      const double inner_err = u_hat - iL;

      if (p.kind == ConverterKind::Boost) {
        dx[o] = boost_rhs({iL, V}, cmd.dprime, 0.0, p).diL;
      } else {
        dx[o] = buck_rhs({iL, V}, cmd.duty, 0.0, p).diL;
      }
      dx.segment(o + 1, u.kc.n) = u.kc.A * xc + u.kc.B * inner_err;
      dx.segment(o + 1 + u.kc.n, u.kv.n) = u.kv.A * xv + u.kv.B * e1;
      dx.segment(o + 1 + u.kc.n + u.kv.n, u.kr.n) = u.kr.A * xr + u.kr.B * s.e2;
      i_total += s.i_out;
      if (sig) (*sig)[k] = s;
    }
    dx[0] = (i_total - iload + ipv) / capacitance_;
    if (link) *link = {iload, ipv, iref};
  }

 private:
  const ConverterNetwork& net_;
  const LoadProfile& load_;
  const SimulationOptions& opts_;
  std::vector<UnitModel> units_;
  Eigen::Index states_ = 0;
  double capacitance_ = 0.0;
  std::vector<double> measurement_;
};

void check_options(const ConverterNetwork& net, const SimulationOptions& opts) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, "simulate: " + msg); };
  if (!(opts.horizon > 0.0) || !std::isfinite(opts.horizon)) fail("horizon must be > 0");
  if (!(opts.dt > 0.0) || opts.dt > 1e-4) fail("dt must be in (0, 1e-4] s");
  if (!(opts.log_interval > 0.0)) fail("log_interval must be > 0");
  if (!std::isfinite(opts.iref) || !std::isfinite(opts.initial_voltage) || opts.initial_voltage < 0.0) {
    fail("iref and initial_voltage must be finite, initial_voltage >= 0");
  }
  const double C = net.units().front().params.C;
  for (const auto& u : net.units()) {
    if (u.params.C != C) fail("all converters must list the same DC-link capacitance");
    if (u.params.Vref != net.units().front().params.Vref) fail("all converters must share one Vref");
  }
}

}  // namespace

SimTrace simulate(const ConverterNetwork& net, const LoadProfile& load, const NoiseModel& noise,
                  const SimulationOptions& opts) {
  check_options(net, opts);
  load.validate();
  noise.validate();

  Plant plant(net, load, opts);
  const std::size_t m = net.size();
  const double vref = net.units().front().params.Vref;
  const auto steps = static_cast<std::size_t>(std::llround(opts.horizon / opts.dt));
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.log_interval / opts.dt)));
  const double h = opts.dt;

  SimTrace tr;
  tr.converters = m;
  tr.iL.resize(m);
  tr.i.resize(m);
  tr.duty.resize(m);
  tr.e2.resize(m);
  tr.gamma.resize(m);
  tr.saturated.resize(m);
  const std::size_t expected = steps / stride + 1;
  for (auto* v : {&tr.t, &tr.V, &tr.iref, &tr.iload, &tr.ipv, &tr.e1, &tr.i_C}) v->reserve(expected);

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto& meas = plant.measurement_error();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(plant.states());
  x[0] = opts.initial_voltage;
  Eigen::VectorXd k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()), tmp(x.size());
  LinkSignals link;
  std::vector<UnitSignals> sig(m);

  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = static_cast<double>(n) * h;
    for (std::size_t k = 0; k < m; ++k) {
      const double offset = k < noise.dc_offset.size() ? noise.dc_offset[k] : 0.0;
      const double z = noise.relative_noise > 0.0 ? gauss(rng) : 0.0;
      meas[k] = offset + noise.relative_noise * std::abs(x[0]) * z;
    }
    const double held = t + 0.5 * h;
    plant.rhs(t, held, x, k1, &link, &sig);
    if (n % stride == 0) {
      tr.t.push_back(t);
      tr.V.push_back(x[0]);
      tr.iref.push_back(link.iref);
      tr.iload.push_back(link.iload);
      tr.ipv.push_back(link.ipv);
      tr.e1.push_back(vref - x[0]);
      double i_sum = 0.0;
      const auto& gammas = net.share().gammas_at(held);
      for (std::size_t k = 0; k < m; ++k) {
        tr.iL[k].push_back(x[plant.unit_offset(k)]);
        tr.i[k].push_back(sig[k].i_out);
        tr.duty[k].push_back(sig[k].duty);
        tr.e2[k].push_back(sig[k].e2);
        tr.gamma[k].push_back(gammas[k]);
        tr.saturated[k].push_back(sig[k].saturated ? 1 : 0);
        i_sum += sig[k].i_out;
      }
      tr.i_C.push_back(i_sum - link.iload + link.ipv);
    }
    if (n == steps) break;

    tmp = x + 0.5 * h * k1;
    plant.rhs(t + 0.5 * h, held, tmp, k2);
    tmp = x + 0.5 * h * k2;
    plant.rhs(t + 0.5 * h, held, tmp, k3);
    tmp = x + h * k3;
    plant.rhs(t + h, held, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x[0] = std::max(x[0], 0.0);

    if (!x.allFinite() || std::abs(x[0]) > 10.0 * vref) {
      std::ostringstream os;
      os << "simulation diverged at t=" << t + h << " s (V=" << x[0] << ")";
      throw Error(ErrorCode::NumericalBlowup, os.str());
    }
  }
  return tr;
}

}  // namespace dcnet
