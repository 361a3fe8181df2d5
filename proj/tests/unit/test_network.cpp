#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include "doctest.h"
#include "dcnet/error.hpp"
#include "dcnet/network.hpp"
#include "dcnet/presets.hpp"

using namespace dcnet;
using cd = std::complex<double>;

namespace {

std::vector<ConverterUnit> make_units(std::size_t m) {
  std::vector<ConverterUnit> units;
  for (std::size_t k = 0; k < m; ++k) {
    ConverterUnit u;
    u.params = {(0.09 + 0.01 * static_cast<double>(k)) * 1e-3, 400e-6, 125.0 + 2.0 * static_cast<double>(k), 250.0,
                ConverterKind::Boost};
    units.push_back(u);
  }
  return units;
}

ConverterNetwork make_network(std::vector<double> gammas, bool strict = true,
                              std::vector<ConverterUnit> units = {}) {
  const OuterPreset& p = builtin_preset("paper-vi");
  if (units.empty()) units = make_units(gammas.size());
  ShareSchedule sched;
  sched.breakpoints.push_back({0.0, std::move(gammas)});
  return ConverterNetwork(std::move(units), p.inner, p.controllers, sched,
                          {p.nominal_L, p.nominal_C, p.nominal_dprime}, strict);
}

double rel(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Largest relative mismatch between the explicit network and the reduced
// single converter over the given grid.
double equivalence_error(const ConverterNetwork& net, const std::vector<double>& gammas,
                         const std::vector<double>& grid) {
  const ClosedLoopSet cl = build_closed_loop(net.shaped(), net.voltage_plant(), net.nominal().dprime,
                                             net.controllers());
  double worst = 0.0;
  for (double w : grid) {
    const NetworkResponse r = network_response(net, gammas, w);
    const cd tv = cl.T_VrefV.at_frequency(w), ti = cl.T_irefV.at_frequency(w), gs = cl.GvS.at_frequency(w);
    worst = std::max({worst, rel(r.voltage[0], tv), rel(r.voltage[1], ti), rel(r.voltage[2], -ti - gs)});
  }
  return worst;
}

std::vector<double> random_shares(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> g(m);
  for (auto& x : g) x = u(rng);
  const double sum = std::accumulate(g.begin(), g.end(), 0.0);
  for (auto& x : g) x /= sum;
  g.back() = 1.0 - std::accumulate(g.begin(), g.end() - 1, 0.0);
  return g;
}

}  // namespace

TEST_CASE("single converter network is the single-converter loop") {
  const ConverterNetwork net = make_network({1.0});
  CHECK(equivalence_error(net, {1.0}, logspace(1e-2, 1e6, 200)) <= 1e-9);
}

TEST_CASE("three-converter equivalence at the reference shares") {
  const auto grid = logspace(1e-2, 1e6, 200);
  for (const auto& g : {std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, std::vector<double>{0.5, 0.2, 0.3}}) {
    const ConverterNetwork net = make_network(g);
    CHECK(equivalence_error(net, g, grid) <= 1e-8);
  }
}

TEST_CASE("equivalence holds for random shares up to eight converters") {
  std::mt19937_64 rng(99);
  const auto grid = logspace(1e-2, 1e6, 80);
  for (std::size_t m = 1; m <= 8; ++m) {
    const auto g = random_shares(rng, m);
    const ConverterNetwork net = make_network(g);
    CHECK(equivalence_error(net, g, grid) <= 1e-8);
  }
}

TEST_CASE("mistuned current controller breaks equivalence") {
  auto units = make_units(3);
  units[1].kc_design_L = 1.5 * units[1].params.L;
  const std::vector<double> g{0.5, 0.2, 0.3};
  CHECK_THROWS_AS(make_network(g, true, units), Error);
  const ConverterNetwork loose = make_network(g, false, units);
  CHECK(equivalence_error(loose, g, logspace(1e-2, 1e6, 50)) > 1e-6);
}

TEST_CASE("shares must sum to one") {
  try {
    make_network({0.5, 0.2, 0.2});
    FAIL("expected ShareSumViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShareSumViolation);
  }
  const ConverterNetwork loose = make_network({0.5, 0.2, 0.2}, false);
  try {
    reduce_to_equivalent(loose);
    FAIL("expected ShareSumViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShareSumViolation);
  }
}

TEST_CASE("schedule lookup") {
  ShareSchedule s;
  s.breakpoints = {{0.0, {0.5, 0.5}}, {2.0, {0.3, 0.7}}};
  CHECK(s.gammas_at(-1.0)[0] == 0.5);
  CHECK(s.gammas_at(1.999)[0] == 0.5);
  CHECK(s.gammas_at(2.0)[0] == 0.3);
  CHECK(s.converters() == 2);
  s.breakpoints[1].time = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("current conservation at the shared capacitor") {
  const std::vector<double> g{0.5, 0.2, 0.3};
  const ConverterNetwork net = make_network(g);
  for (double w : {0.1, 10.0, 1000.0}) {
    const NetworkResponse r = network_response(net, g, w);
    const cd sc(0.0, w * net.nominal().C);
    for (int col = 0; col < 3; ++col) {
      cd total = 0.0;
      for (const auto& c : r.currents) total += c[col];
      const cd expect = sc * r.voltage[col] + (col == 2 ? 1.0 : 0.0);
      CHECK(std::abs(total - expect) <= 1e-9 * std::max(1.0, std::abs(total)));
    }
  }
}

TEST_CASE("per-converter paths add up to the equivalent converter") {
  const std::vector<double> g{0.5, 0.2, 0.3};
  const ConverterNetwork net = make_network(g);
  const auto& c = net.controllers();
  const double dp = net.nominal().dprime;
  for (double w : {0.01, 1.0, 100.0, 1e4}) {
    cd from_iref = 0.0, from_e1 = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const ConverterCurrentPaths p = per_converter_current(net, k);
      from_iref += p.from_iref.at_frequency(w);
      from_e1 += p.from_e1.at_frequency(w);
    }
    const cd gc = net.shaped().at_frequency(w), kv = c.Kv.at_frequency(w), kr = c.Kr.at_frequency(w);
    const cd loop = 1.0 + dp * gc * kr;
    CHECK(rel(from_iref, dp * gc * kr / loop) < 1e-9);
    CHECK(rel(from_e1, dp * gc * (kv + c.eta * kr) / loop) < 1e-9);
  }
}

TEST_CASE("zero share keeps only the voltage path") {
  const ConverterNetwork net = make_network({0.0, 0.4, 0.6}, false);
  const ConverterCurrentPaths p = per_converter_current(net, 0);
  CHECK(p.from_iref.is_zero());
  const auto& c = net.controllers();
  const double dp = net.nominal().dprime;
  for (double w : {0.5, 50.0}) {
    const cd gc = net.shaped().at_frequency(w), kv = c.Kv.at_frequency(w), kr = c.Kr.at_frequency(w);
    CHECK(rel(p.from_e1.at_frequency(w), dp * gc * kv / (3.0 * (1.0 + dp * gc * kr))) < 1e-9);
  }
}

TEST_CASE("steady-state currents follow the shares when e1 is zero") {
  const std::vector<double> g{0.5, 0.2, 0.3};
  const ConverterNetwork net = make_network(g);
  std::vector<double> dc;
  for (std::size_t k = 0; k < 3; ++k) dc.push_back(dc_gain(per_converter_current(net, k).from_iref).value);
  CHECK(dc[0] / dc[1] == doctest::Approx(0.5 / 0.2).epsilon(1e-9));
  CHECK(dc[2] / dc[1] == doctest::Approx(0.3 / 0.2).epsilon(1e-9));
}

TEST_CASE("sharing bound") {
  const ConverterNetwork net = make_network({0.5, 0.2, 0.3});
  const SharingTerms t = sharing_terms(net);
  const double t1 = std::abs(dc_gain(t.T1).value), t2 = std::abs(dc_gain(t.T2).value);
  const double eta = net.controllers().eta;
  CHECK(sharing_bound(net, 0, 1, 0.0) == 0.0);
  CHECK(sharing_bound(net, 0, 1, 5.0) == doctest::Approx((eta * t1 + std::abs(1 / 0.5 - 1 / 0.2) * t2) * 5.0));
  CHECK(sharing_bound(net, 0, 1, 5.0) == doctest::Approx(sharing_bound(net, 0, 1, -5.0)));

  const ConverterNetwork equal = make_network({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(sharing_bound(equal, 0, 2, 2.0) == doctest::Approx(eta * std::abs(dc_gain(sharing_terms(equal).T1).value) * 2.0));
  CHECK_THROWS_AS(sharing_bound(net, 0, 5, 1.0), Error);

  // DC values from the controllers alone: the shaped plant has unit DC gain
  const auto& c = net.controllers();
  const double dp = net.nominal().dprime;
  const double kv0 = c.Kv.at_frequency(0.0).real(), kr0 = c.Kr.at_frequency(0.0).real();
  const double t1_0 = dp * kr0 / (1.0 + dp * kr0);
  const double t2_0 = dp * kv0 / (3.0 * (1.0 + dp * kr0));
  const double oracle = (eta * std::abs(t1_0) + 3.0 * std::abs(t2_0)) * 5.0;
  CHECK(sharing_bound(net, 0, 1, 5.0) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(oracle == doctest::Approx(6.24959762).epsilon(1e-8));
}
