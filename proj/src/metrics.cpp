#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "dcnet/error.hpp"
#include "dcnet/simulation.hpp"

namespace dcnet {

void write_trace_csv(const SimTrace& tr, std::ostream& os) {
  os << "t,V,iref,iload,ipv,e1,i_C";
  for (std::size_t k = 1; k <= tr.converters; ++k) {
    os << ",iL_" << k << ",i_" << k << ",duty_" << k << ",e2_" << k << ",gamma_" << k << ",sat_" << k;
  }
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.9g", v);
    os << buf;
  };
  for (std::size_t n = 0; n < tr.size(); ++n) {
    std::snprintf(buf, sizeof buf, "%.9g", tr.t[n]);
    os << buf;
    put(tr.V[n]);
    put(tr.iref[n]);
    put(tr.iload[n]);
    put(tr.ipv[n]);
    put(tr.e1[n]);
    put(tr.i_C[n]);
    for (std::size_t k = 0; k < tr.converters; ++k) {
      put(tr.iL[k][n]);
      put(tr.i[k][n]);
      put(tr.duty[k][n]);
      put(tr.e2[k][n]);
      put(tr.gamma[k][n]);
      os << ',' << static_cast<int>(tr.saturated[k][n]);
    }
    os << '\n';
  }
}

SteadyStateMetrics steady_state_metrics(const SimTrace& tr, const LoadProfile& load, const MetricsWindow& w) {
  if (!(w.t1 > w.t0)) throw Error(ErrorCode::WindowTooShort, "metrics window is empty");
  if (load.square_freq > 0.0 && w.t1 - w.t0 < 1.0 / load.square_freq - 1e-9) {
    std::ostringstream os;
    os << "metrics window of " << w.t1 - w.t0 << " s is shorter than one load period (" << 1.0 / load.square_freq
       << " s)";
    throw Error(ErrorCode::WindowTooShort, os.str());
  }
  if (tr.size() == 0 || w.t0 < tr.t.front() - 1e-12 || w.t1 > tr.t.back() + 1e-9) {
    std::ostringstream os;
    os << "metrics window (" << w.t0 << ", " << w.t1 << ") lies outside the trace";
    if (tr.size() != 0 && w.t1 > tr.t.back()) {
      throw Error(ErrorCode::WindowTooShort, os.str() + " (trace ends at " + std::to_string(tr.t.back()) + " s)");
    }
    throw Error(ErrorCode::InvalidArgument, os.str());
  }

  const std::size_t m = tr.converters;
  const std::vector<double> edges = load.edges(w.t0 - w.settle_time, w.t1);
  auto settled = [&](double t) {
    for (double e : edges) {
      if (t >= e && t < e + w.settle_time) return false;
    }
    return true;
  };

  SteadyStateMetrics out;
  out.share_ratios.assign(m, 0.0);
  out.scaled_current_gap.assign(m, std::vector<double>(m, 0.0));
  out.scaled_current_dc_gap.assign(m, std::vector<double>(m, 0.0));
  std::vector<std::vector<double>> signed_gap(m, std::vector<double>(m, 0.0));
  std::vector<double> i_mean(m, 0.0);
  double v_min = std::numeric_limits<double>::infinity(), v_max = -v_min;
  double vs_min = v_min, vs_max = v_max;
  double worst_dev = 0.0;
  std::size_t n_used = 0;

  for (std::size_t n = 0; n < tr.size(); ++n) {
    const double t = tr.t[n];
    if (t < w.t0 || t > w.t1) continue;
    ++n_used;
    const double V = tr.V[n];
    out.V_mean += V;
    v_min = std::min(v_min, V);
    v_max = std::max(v_max, V);
    if (settled(t)) {
      vs_min = std::min(vs_min, V);
      vs_max = std::max(vs_max, V);
      worst_dev = std::max(worst_dev, std::abs(V - w.vref));
    }
    out.e1_mean += tr.e1[n];
    out.abs_e1_mean += std::abs(tr.e1[n]);
    out.iref_mean += tr.iref[n];
    out.net_load_mean += tr.iload[n] - tr.ipv[n];
    for (std::size_t k = 0; k < m; ++k) {
      i_mean[k] += tr.i[k][n];
      for (std::size_t l = 0; l < m; ++l) {
        const double d = tr.i[k][n] / tr.gamma[k][n] - tr.i[l][n] / tr.gamma[l][n];
        out.scaled_current_gap[k][l] += std::abs(d);
        signed_gap[k][l] += d;
      }
    }
  }
  if (n_used == 0) throw Error(ErrorCode::WindowTooShort, "metrics window contains no samples");

  const double inv = 1.0 / static_cast<double>(n_used);
  out.samples = n_used;
  out.V_mean *= inv;
  out.V_p2p = v_max - v_min;
  out.V_p2p_settled = vs_max >= vs_min ? vs_max - vs_min : 0.0;
  out.V_max_deviation_settled = worst_dev;
  out.e1_mean *= inv;
  out.abs_e1_mean *= inv;
  out.iref_mean *= inv;
  out.net_load_mean *= inv;
  double total = 0.0;
  for (double v : i_mean) total += v * inv;
  for (std::size_t k = 0; k < m; ++k) {
    out.share_ratios[k] = total != 0.0 ? i_mean[k] * inv / total : 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      out.scaled_current_gap[k][l] *= inv;
      out.scaled_current_dc_gap[k][l] = std::abs(signed_gap[k][l] * inv);
    }
  }
  return out;
}

}  // namespace dcnet
