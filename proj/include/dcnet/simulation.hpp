#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcnet/network.hpp"

namespace dcnet {

struct PvSample {
  double time = 0.0;     ///< s
  double current = 0.0;  ///< A injected into the DC link
  bool operator==(const PvSample&) const = default;
};

/// Reads a two-column (seconds, amperes) text file. Blank lines and lines
/// starting with '#' are skipped; commas or whitespace separate columns.
std::vector<PvSample> read_pv_trace(const std::string& path);

/// Load drawn from the DC link. The power demand is base_power plus a square
/// wave of amplitude square_amp (high during the first half of each period);
/// a step entry replaces the whole demand from its time until the next step.
/// Above cutoff_voltage the load is constant-power, below it the same power
/// curve is drawn resistively (P V / Vcut^2), which keeps startup from V = 0
/// finite.
struct LoadProfile {
  struct Step {
    double time = 0.0;
    double power = 0.0;
    bool operator==(const Step&) const = default;
  };
  double base_power = 0.0;   ///< W
  double square_amp = 0.0;   ///< W
  double square_freq = 0.0;  ///< Hz, 0 disables the square wave
  std::vector<Step> steps;
  double ripple_amp = 0.0;  ///< A, sinusoidal load current component
  double ripple_freq = 120.0;
  double cutoff_voltage = 200.0;
  std::vector<PvSample> pv_current;

  /// Throws ValidationError naming the violated constraint.
  void validate() const;

  double power(double t) const;
  double current(double t, double V) const;
  /// Load current for a given power demand; current(t, V) uses power(t).
  double current_at_power(double power, double t, double V) const;
  /// Linear interpolation of the PV samples, held at the end values; 0 if none.
  double pv(double t) const;
  /// Times at which the power demand changes discontinuously within [t0, t1].
  std::vector<double> edges(double t0, double t1) const;

  bool operator==(const LoadProfile&) const = default;
};

/// Voltage-sensor corruption seen by each converter's controllers. Logged
/// quantities are always the true values.
struct NoiseModel {
  std::vector<double> dc_offset;  ///< V per converter; missing entries are 0
  double relative_noise = 0.0;    ///< Gaussian std as a fraction of |V|
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const NoiseModel&) const = default;
};

enum class ReferenceMode { Centralized, Decentralized };

const char* to_string(ReferenceMode mode) noexcept;

struct SimulationOptions {
  ReferenceMode mode = ReferenceMode::Centralized;
  double iref = 0.0;  ///< A, used in decentralized mode
  double horizon = 1.0;
  double dt = 2e-5;
  double log_interval = 2e-4;  ///< rounded to a whole number of steps
  double initial_voltage = 0.0;

  bool operator==(const SimulationOptions&) const = default;
};

struct SimTrace {
  std::size_t converters = 0;
  std::vector<double> t, V, iref, iload, ipv, e1, i_C;
  /// Per converter, indexed [k][sample].
  std::vector<std::vector<double>> iL, i, duty, e2, gamma;
  std::vector<std::vector<std::uint8_t>> saturated;

  std::size_t size() const noexcept { return t.size(); }
};

/// One CSV row per sample, header first. Columns:
/// t,V,iref,iload,ipv,e1,i_C then iL_k,i_k,duty_k,e2_k,gamma_k,sat_k for k = 1..m.
void write_trace_csv(const SimTrace& trace, std::ostream& os);

/// Fixed-step RK4 simulation of the averaged converters on one shared DC-link
/// capacitor (every unit must list the same C), with each unit running its own
/// current controller, Kv/m and Kr. Noise samples are held over each step.
/// Throws ConfigError on bad options and NumericalBlowup on divergence.
SimTrace simulate(const ConverterNetwork& net, const LoadProfile& load, const NoiseModel& noise,
                  const SimulationOptions& opts);

struct SteadyStateMetrics {
  double V_mean = 0.0;
  double V_p2p = 0.0;
  /// V_p2p and worst |V - Vref| with samples near load edges excluded.
  double V_p2p_settled = 0.0;
  double V_max_deviation_settled = 0.0;
  double e1_mean = 0.0;
  double abs_e1_mean = 0.0;
  double iref_mean = 0.0;
  double net_load_mean = 0.0;  ///< mean of iload - ipv
  std::vector<double> share_ratios;
  /// Time average of |i_k/g_k - i_l/g_l|.
  std::vector<std::vector<double>> scaled_current_gap;
  /// |mean(i_k/g_k - i_l/g_l)|, the steady-state (DC) gap.
  std::vector<std::vector<double>> scaled_current_dc_gap;
  std::size_t samples = 0;
};

struct MetricsWindow {
  double t0 = 0.0;
  double t1 = 0.0;
  double vref = 0.0;
  double settle_time = 0.1;  ///< excluded after each load edge
};

/// Throws WindowTooShort if the window is shorter than one load period (or
/// empty), InvalidArgument if it lies outside the trace.
SteadyStateMetrics steady_state_metrics(const SimTrace& trace, const LoadProfile& load, const MetricsWindow& window);

}  // namespace dcnet
