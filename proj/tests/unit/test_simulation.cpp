#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dcnet/error.hpp"
#include "dcnet/presets.hpp"
#include "dcnet/simulation.hpp"

using namespace dcnet;

namespace {

ConverterNetwork reference_network(double C = 400e-6) {
  const OuterPreset& p = builtin_preset("paper-vi");
  std::vector<ConverterUnit> units;
  const double L[] = {0.096e-3, 0.12e-3, 0.14e-3};
  const double Vg[] = {135.0, 125.0, 130.0};
  for (int k = 0; k < 3; ++k) units.push_back({{L[k], C, Vg[k], 250.0, ConverterKind::Boost}, std::nullopt});
  ShareSchedule s;
  s.breakpoints = {{0.0, {1.0 / 3, 1.0 / 3, 1.0 - 2.0 / 3}}, {0.5, {0.5, 0.2, 0.3}}};
  return ConverterNetwork(units, p.inner, p.controllers, s, {p.nominal_L, p.nominal_C, p.nominal_dprime});
}

LoadProfile reference_load() {
  LoadProfile l;
  l.base_power = 5000.0;
  l.square_amp = 2000.0;
  l.square_freq = 1.0;
  return l;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("equilibrium is preserved") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.horizon = 0.5;
  o.initial_voltage = 250.0;
  const SimTrace tr = simulate(net, LoadProfile{}, NoiseModel{}, o);
  double drift = 0.0;
  for (double v : tr.V) drift = std::max(drift, std::abs(v - 250.0));
  CHECK(drift <= 1e-6);
  MetricsWindow w{0.1, 0.5, 250.0, 0.1};
  LoadProfile none;
  const SteadyStateMetrics m = steady_state_metrics(tr, none, w);
  CHECK(m.V_p2p <= 1e-6);
}

TEST_CASE("runs are deterministic in the seed") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.horizon = 0.2;
  NoiseModel n;
  n.dc_offset = {2.0, -2.0, 3.0};
  n.relative_noise = 5e-4;
  n.seed = 42;
  const SimTrace a = simulate(net, reference_load(), n, o);
  const SimTrace b = simulate(net, reference_load(), n, o);
  CHECK(a.V == b.V);
  CHECK(a.iL == b.iL);
  n.seed = 43;
  const SimTrace c = simulate(net, reference_load(), n, o);
  CHECK(a.V != c.V);
}

TEST_CASE("logged currents obey the circuit equations") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.horizon = 0.6;
  LoadProfile load;
  load.base_power = 5000.0;
  const SimTrace tr = simulate(net, load, NoiseModel{}, o);
  REQUIRE(tr.converters == 3);
  const double C = 400e-6;
  double worst = 0.0;
  for (std::size_t n = 1; n + 1 < tr.size(); ++n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      sum += tr.i[k][n];
      CHECK(tr.i[k][n] == doctest::Approx((1.0 - tr.duty[k][n]) * tr.iL[k][n]).epsilon(1e-9));
    }
    CHECK(tr.i_C[n] == doctest::Approx(sum - tr.iload[n] + tr.ipv[n]).epsilon(1e-9));
    if (tr.t[n] > 0.3) {
      const double dvdt = (tr.V[n + 1] - tr.V[n - 1]) / (tr.t[n + 1] - tr.t[n - 1]);
      worst = std::max(worst, std::abs(C * dvdt - tr.i_C[n]));
    }
  }
  CHECK(worst < 0.05);
}

TEST_CASE("halving the step changes little") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.horizon = 1.0;
  const SimTrace a = simulate(net, reference_load(), NoiseModel{}, o);
  o.dt = 1e-5;
  const SimTrace b = simulate(net, reference_load(), NoiseModel{}, o);
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a.t[n] > 0.3) worst = std::max(worst, std::abs(a.V[n] - b.V[n]));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("centralized run regulates and shares") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.horizon = 2.0;
  const SimTrace tr = simulate(net, reference_load(), NoiseModel{}, o);
  const SteadyStateMetrics m = steady_state_metrics(tr, reference_load(), {1.0, 2.0, 250.0, 0.1});
  CHECK(m.V_max_deviation_settled / 250.0 <= 0.02);
  CHECK(m.share_ratios[0] == doctest::Approx(0.5).epsilon(0.04));
  CHECK(m.share_ratios[1] == doctest::Approx(0.2).epsilon(0.1));
  CHECK(m.share_ratios[2] == doctest::Approx(0.3).epsilon(0.07));
  CHECK(m.samples > 0);
}

TEST_CASE("simulation option checks") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.dt = 2e-4;
  CHECK(code_of([&] { simulate(net, reference_load(), NoiseModel{}, o); }) == ErrorCode::ConfigError);

  const OuterPreset& p = builtin_preset("paper-vi");
  std::vector<ConverterUnit> units = reference_network().units();
  units[2].params.C = 500e-6;
  ConverterNetwork mixed(units, p.inner, p.controllers, reference_network().share(),
                         {p.nominal_L, p.nominal_C, p.nominal_dprime});
  CHECK(code_of([&] { simulate(mixed, reference_load(), NoiseModel{}, SimulationOptions{}); }) == ErrorCode::ConfigError);
}

TEST_CASE("load profile") {
  LoadProfile l = reference_load();
  CHECK(l.power(0.25) == doctest::Approx(7000.0));
  CHECK(l.power(0.75) == doctest::Approx(3000.0));
  CHECK(l.current(0.25, 250.0) == doctest::Approx(28.0));
  // below the cutoff the load turns resistive
  CHECK(l.current(0.25, 100.0) == doctest::Approx(7000.0 * 100.0 / (200.0 * 200.0)));
  CHECK(l.current(0.25, 0.0) == 0.0);
  const auto e = l.edges(0.0, 2.0);
  CHECK(e.size() >= 3);
  l.steps = {{1.2, 1000.0}};
  CHECK(l.power(1.5) == doctest::Approx(1000.0));
  l.pv_current = {{0.0, 0.0}, {1.0, 4.0}};
  CHECK(l.pv(0.5) == doctest::Approx(2.0));
  CHECK(l.pv(5.0) == doctest::Approx(4.0));
  l.cutoff_voltage = -1.0;
  CHECK_THROWS_AS(l.validate(), Error);
}

TEST_CASE("pv trace files") {
  const auto good = temp_file("dcnet_pv_ok.csv", "# t, A\n0, 0\n0.5 1.5\n\n1.0,3\n");
  const auto s = read_pv_trace(good.string());
  REQUIRE(s.size() == 3);
  CHECK(s[1].current == doctest::Approx(1.5));
  const auto bad = temp_file("dcnet_pv_bad.csv", "0,0\n1,abc\n");
  CHECK(code_of([&] { read_pv_trace(bad.string()); }) == ErrorCode::ParseError);
  const auto back = temp_file("dcnet_pv_back.csv", "0,0\n1,1\n0.5,2\n");
  CHECK(code_of([&] { read_pv_trace(back.string()); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read_pv_trace("/nonexistent/pv.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("metrics windows") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.horizon = 0.3;
  const SimTrace tr = simulate(net, reference_load(), NoiseModel{}, o);
  CHECK(code_of([&] { steady_state_metrics(tr, reference_load(), {0.0, 0.3, 250.0, 0.1}); }) ==
        ErrorCode::WindowTooShort);
  CHECK(code_of([&] { steady_state_metrics(tr, reference_load(), {0.0, 5.0, 250.0, 0.1}); }) ==
        ErrorCode::WindowTooShort);
}

TEST_CASE("trace csv layout") {
  const ConverterNetwork net = reference_network();
  SimulationOptions o;
  o.horizon = 0.01;
  const SimTrace tr = simulate(net, reference_load(), NoiseModel{}, o);
  std::ostringstream os;
  write_trace_csv(tr, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("t,V,iref,iload,ipv,e1,i_C,iL_1,i_1,duty_1,e2_1,gamma_1,sat_1", 0) == 0);
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == tr.size());
}
