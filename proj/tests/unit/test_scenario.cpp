#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dcnet/error.hpp"
#include "dcnet/scenario.hpp"

using namespace dcnet;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(DCNET_SOURCE_DIR) / "scenarios";

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string reference_text() { return slurp(kScenarios / "paper-vi.scenario"); }

std::string replaced(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

Error error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorCode::InvalidArgument, "");
}

const CheckResult* find_check(const std::vector<CheckResult>& checks, const std::string& prefix) {
  for (const auto& c : checks) {
    if (c.name.rfind(prefix, 0) == 0) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("shipped reference scenario") {
  const Scenario sc = parse_scenario((kScenarios / "paper-vi.scenario").string());
  REQUIRE(sc.converters.size() == 3);
  CHECK(sc.converters[0].L == doctest::Approx(0.096e-3));
  CHECK(sc.converters[1].L == doctest::Approx(0.12e-3));
  CHECK(sc.converters[2].L == doctest::Approx(0.14e-3));
  for (const auto& c : sc.converters) CHECK(c.C == doctest::Approx(400e-6));
  CHECK(sc.converters[0].Vg == 135.0);
  CHECK(sc.converters[1].Vg == 125.0);
  CHECK(sc.converters[2].Vg == 130.0);
  CHECK(sc.nominal.Vref == 250.0);
  CHECK(sc.outer.controllers.eta == doctest::Approx(1.2667));
  CHECK(sc.sim.horizon == doctest::Approx(19.5));
  CHECK(sc.load.base_power == 5000.0);
  CHECK(sc.load.square_amp == 2000.0);
  CHECK(sc.load.square_freq == 1.0);
  CHECK(sc.noise.dc_offset == std::vector<double>{2.0, -2.0, 3.0});
  REQUIRE(sc.shares.breakpoints.size() == 2);
  for (const auto& bp : sc.shares.breakpoints) {
    double sum = 0.0;
    for (double g : bp.gammas) sum += g;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK(!sc.load.pv_current.empty());
}

TEST_CASE("serialize then parse is the identity") {
  const Scenario sc = parse_scenario((kScenarios / "paper-vi.scenario").string());
  const Scenario back = parse_scenario_text(serialize_scenario(sc), kScenarios.string());
  CHECK(back == sc);

  // explicit controllers survive as well
  Scenario explicit_sc = sc;
  explicit_sc.outer.preset.reset();
  explicit_sc.outer.controllers.eta = 0.9;
  const Scenario back2 = parse_scenario_text(serialize_scenario(explicit_sc), kScenarios.string());
  CHECK(back2 == explicit_sc);
}

TEST_CASE("unknown keys are rejected with their location") {
  const Error e = error_of([] {
    parse_scenario_text(replaced(reference_text(), "  zeta2: 2.2", "  zeta2: 2.2\n  zeta3: 1.0"), kScenarios.string());
  });
  CHECK(e.code() == ErrorCode::ParseError);
  const std::string what = e.what();
  CHECK(what.find("inner.zeta3") != std::string::npos);
  CHECK(what.find("line") != std::string::npos);
}

TEST_CASE("malformed values") {
  CHECK(error_of([] { parse_scenario_text(replaced(reference_text(), "horizon: 19.5", "horizon: soon"), "."); }).code() ==
        ErrorCode::ParseError);
  CHECK(error_of([] { parse_scenario_text("converters: [", "."); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_scenario("/nonexistent/x.scenario"); }).code() == ErrorCode::IoError);
}

TEST_CASE("inner design invariant is enforced") {
  const Error e = error_of([] {
    parse_scenario_text(replaced(reference_text(), "zeta2: 2.2", "zeta2: 0.5"), kScenarios.string());
  });
  CHECK(e.code() == ErrorCode::ValidationError);
  CHECK(std::string(e.what()).find("InnerLoopDesign") != std::string::npos);
}

TEST_CASE("share sums are enforced") {
  const Error e = error_of([] {
    parse_scenario_text(replaced(reference_text(), "[0.5, 0.2, 0.3]}", "[0.5, 0.2, 0.2]}"), kScenarios.string());
  });
  CHECK(e.code() == ErrorCode::ShareSumViolation);
}

TEST_CASE("unknown preset") {
  const Error e = error_of([] {
    parse_scenario_text(replaced(reference_text(), "preset: paper-vi", "preset: nothing-here"), kScenarios.string());
  });
  CHECK(e.code() == ErrorCode::ParseError);
}

TEST_CASE("preset directory") {
  const fs::path dir = fs::temp_directory_path() / "dcnet_presets_test";
  fs::create_directories(dir);
  std::ofstream(dir / "tiny.yaml") << "description: proportional only\n"
                                      "Kv: {num: [0.5], den: [1]}\n"
                                      "Kr: {num: [0], den: [1]}\n"
                                      "eta: 1.0\n";
  ::setenv("DCNET_PRESET_DIR", dir.string().c_str(), 1);
  const auto names = list_presets();
  CHECK(std::find(names.begin(), names.end(), "paper-vi") != names.end());
  CHECK(std::find(names.begin(), names.end(), "tiny") != names.end());
  const OuterPreset p = resolve_preset("tiny");
  CHECK(p.controllers.Kv.at_frequency(1.0).real() == doctest::Approx(0.5));
  CHECK(p.controllers.Kr.is_zero());
  ::unsetenv("DCNET_PRESET_DIR");
  CHECK_THROWS_AS(resolve_preset("tiny"), Error);
}

TEST_CASE("verify passes for the reference scenario") {
  const Scenario sc = parse_scenario((kScenarios / "paper-vi.scenario").string());
  const VerifyReport r = verify_scenario(sc);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.value << " " << c.detail);
  CHECK(r.all_passed());
  const CheckResult* eq = find_check(r.checks, "equivalence");
  REQUIRE(eq);
  CHECK(eq->value <= 1e-8);
}

TEST_CASE("verify without a current-reference controller") {
  const std::string text = replaced(reference_text(), "outer:\n  preset: paper-vi",
                                    "outer:\n  Kv: {num: [0.5], den: [1]}\n  Kr: {num: [0], den: [1]}\n  eta: 1.2667");
  const Scenario sc = parse_scenario_text(text, kScenarios.string());
  const VerifyReport r = verify_scenario(sc);
  const CheckResult* eq = find_check(r.checks, "equivalence");
  REQUIRE(eq);
  CHECK(eq->passed);
  const CheckResult* ti = find_check(r.checks, "DC gain |T_irefV(0)|");
  REQUIRE(ti);
  CHECK(ti->passed);
  CHECK(ti->detail == "|T_irefV(0)| = 0");
}

TEST_CASE("verify flags a mistuned current controller") {
  const std::string text = replaced(reference_text(), "{kind: boost, L: 0.12e-3, C: 400e-6, Vg: 125}",
                                    "{kind: boost, L: 0.12e-3, C: 400e-6, Vg: 125, kc_design_L: 0.2e-3}");
  const Scenario sc = parse_scenario_text(text, kScenarios.string());
  const VerifyReport r = verify_scenario(sc);
  CHECK_FALSE(r.all_passed());
  const CheckResult* c2 = find_check(r.checks, "inner closure, converter 2");
  REQUIRE(c2);
  CHECK_FALSE(c2->passed);
  const CheckResult* c1 = find_check(r.checks, "inner closure, converter 1");
  REQUIRE(c1);
  CHECK(c1->passed);
}

TEST_CASE("too short a horizon surfaces in the metrics stage") {
  Scenario sc = parse_scenario((kScenarios / "paper-vi.scenario").string());
  sc.sim.horizon = 0.01;
  sc.noise = NoiseModel{};
  const fs::path out = fs::temp_directory_path() / "dcnet_short_run";
  fs::create_directories(out);
  const RunResult r = run_scenario(sc, out.string());
  CHECK_FALSE(r.all_passed());
  const CheckResult* m = find_check(r.simulation_checks, "metrics [");
  REQUIRE(m);
  CHECK(m->detail.find("trace ends") != std::string::npos);
  CHECK(fs::exists(out / "metrics.json"));
  CHECK(fs::exists(out / "report.txt"));
}
