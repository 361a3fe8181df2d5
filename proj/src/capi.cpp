#include "dcnet/dcnet.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "dcnet/error.hpp"
#include "dcnet/hinf.hpp"
#include "dcnet/scenario.hpp"

struct dcnet_scenario {
  dcnet::Scenario value;
};

namespace {

thread_local std::string g_last_error;

dcnet_status status_of(dcnet::ErrorCode code) {
  return static_cast<dcnet_status>(static_cast<int>(code) + 1);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
dcnet_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return DCNET_OK;
  } catch (const dcnet::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DCNET_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return DCNET_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw dcnet::Error(dcnet::ErrorCode::InvalidArgument, what);
}

}  // namespace

extern "C" {

const char* dcnet_version(void) { return "0.1.0"; }

const char* dcnet_status_name(dcnet_status status) {
  if (status == DCNET_OK) return "Ok";
  if (status >= DCNET_ERR_ALGEBRAIC_LOOP && status <= DCNET_ERR_INVALID_ARGUMENT) {
    return dcnet::to_string(static_cast<dcnet::ErrorCode>(static_cast<int>(status) - 1));
  }
  return "Internal";
}

const char* dcnet_last_error(void) { return g_last_error.c_str(); }

void dcnet_string_free(char* s) { std::free(s); }

dcnet_status dcnet_scenario_load(const char* path, dcnet_scenario** out) {
  return guarded([&] {
    require(path && out, "dcnet_scenario_load: null argument");
    *out = nullptr;
    auto* sc = new dcnet_scenario{dcnet::parse_scenario(path)};
    *out = sc;
  });
}

dcnet_status dcnet_scenario_parse(const char* text, const char* base_dir, dcnet_scenario** out) {
  return guarded([&] {
    require(text && out, "dcnet_scenario_parse: null argument");
    *out = nullptr;
    auto* sc = new dcnet_scenario{dcnet::parse_scenario_text(text, base_dir ? base_dir : ".")};
    *out = sc;
  });
}

void dcnet_scenario_free(dcnet_scenario* sc) { delete sc; }

dcnet_status dcnet_scenario_serialize(const dcnet_scenario* sc, char** out) {
  return guarded([&] {
    require(sc && out, "dcnet_scenario_serialize: null argument");
    *out = dup(dcnet::serialize_scenario(sc->value));
  });
}

dcnet_status dcnet_scenario_converters(const dcnet_scenario* sc, size_t* count) {
  return guarded([&] {
    require(sc && count, "dcnet_scenario_converters: null argument");
    *count = sc->value.converters.size();
  });
}

dcnet_status dcnet_scenario_set_mode(dcnet_scenario* sc, dcnet_mode mode) {
  return guarded([&] {
    require(sc, "dcnet_scenario_set_mode: null scenario");
    require(mode == DCNET_MODE_CENTRALIZED || mode == DCNET_MODE_DECENTRALIZED, "dcnet_scenario_set_mode: bad mode");
    sc->value.sim.mode =
        mode == DCNET_MODE_CENTRALIZED ? dcnet::ReferenceMode::Centralized : dcnet::ReferenceMode::Decentralized;
  });
}

dcnet_status dcnet_scenario_set_iref(dcnet_scenario* sc, double iref) {
  return guarded([&] {
    require(sc, "dcnet_scenario_set_iref: null scenario");
    require(std::isfinite(iref), "dcnet_scenario_set_iref: iref must be finite");
    sc->value.sim.iref = iref;
  });
}

dcnet_status dcnet_scenario_set_dt(dcnet_scenario* sc, double dt) {
  return guarded([&] {
    require(sc, "dcnet_scenario_set_dt: null scenario");
    if (!(dt > 0.0 && dt <= 1e-4)) {
      throw dcnet::Error(dcnet::ErrorCode::ConfigError, "dt must be in (0, 1e-4] s");
    }
    sc->value.sim.dt = dt;
  });
}

dcnet_status dcnet_scenario_set_seed(dcnet_scenario* sc, uint64_t seed) {
  return guarded([&] {
    require(sc, "dcnet_scenario_set_seed: null scenario");
    sc->value.noise.seed = seed;
  });
}

dcnet_status dcnet_scenario_set_horizon(dcnet_scenario* sc, double horizon) {
  return guarded([&] {
    require(sc, "dcnet_scenario_set_horizon: null scenario");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw dcnet::Error(dcnet::ErrorCode::ConfigError, "horizon must be > 0");
    }
    sc->value.sim.horizon = horizon;
  });
}

dcnet_status dcnet_verify(const dcnet_scenario* sc, char** report, int* passed) {
  return guarded([&] {
    require(sc, "dcnet_verify: null scenario");
    const dcnet::VerifyReport rep = dcnet::verify_scenario(sc->value);
    if (passed) *passed = rep.all_passed() ? 1 : 0;
    if (report) *report = dup(dcnet::format_checks(rep.checks));
  });
}

dcnet_status dcnet_run(const dcnet_scenario* sc, const char* out_dir, char** report, int* passed) {
  return guarded([&] {
    require(sc && out_dir, "dcnet_run: null argument");
    const dcnet::RunResult res = dcnet::run_scenario(sc->value, out_dir);
    if (passed) *passed = res.all_passed() ? 1 : 0;
    if (report) {
      std::string text = "analysis\n" + dcnet::format_checks(res.analysis.checks) + "\nsimulation\n" +
                         dcnet::format_checks(res.simulation_checks);
      *report = dup(text);
    }
  });
}

dcnet_status dcnet_presets_list(char** names) {
  return guarded([&] {
    require(names, "dcnet_presets_list: null argument");
    std::string out;
    for (const auto& n : dcnet::list_presets()) out += n + "\n";
    *names = dup(out);
  });
}

dcnet_status dcnet_hinf_norm(const double* num, size_t num_len, const double* den, size_t den_len, double* norm) {
  return guarded([&] {
    require(num && den && norm && num_len > 0 && den_len > 0, "dcnet_hinf_norm: bad argument");
    std::vector<double> n(num, num + num_len), d(den, den + den_len);
    std::reverse(n.begin(), n.end());
    std::reverse(d.begin(), d.end());
    *norm = dcnet::hinf_norm(dcnet::RationalFunction(dcnet::Polynomial(n), dcnet::Polynomial(d)));
  });
}

}  // extern "C"
