#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dcnet/rational_function.hpp"

namespace test_support {

// Stable proper transfer function of the given order. Poles are spread over
// 0.1..100 rad/s with a damping floor of 0.05 so resonance peaks stay
// resolvable on a dense grid.
inline dcnet::RationalFunction random_stable_tf(std::mt19937_64& rng, int order) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::complex<double>> poles;
  while (static_cast<int>(poles.size()) < order) {
    const double mag = std::pow(10.0, -1.0 + 3.0 * u(rng));
    if (order - static_cast<int>(poles.size()) >= 2 && u(rng) < 0.5) {
      const double zeta = 0.05 + 0.9 * u(rng);
      const double re = -zeta * mag, im = mag * std::sqrt(1.0 - zeta * zeta);
      poles.emplace_back(re, im);
      poles.emplace_back(re, -im);
    } else {
      poles.emplace_back(-mag, 0.0);
    }
  }
  const dcnet::Polynomial den = dcnet::Polynomial::from_roots(poles);
  std::normal_distribution<double> n(0.0, 1.0);
  const int num_deg = static_cast<int>(u(rng) * (order + 1));
  std::vector<double> num(num_deg + 1);
  for (int k = 0; k <= num_deg; ++k) num[k] = n(rng) * std::max(1.0, std::abs(den[k]));
  return dcnet::RationalFunction(dcnet::Polynomial(num), den);
}

// Peak magnitude on a very dense log grid plus DC and a high-frequency probe.
inline double dense_grid_peak(const dcnet::RationalFunction& tf, double lo = 1e-4, double hi = 1e5,
                              std::size_t n = 40000) {
  double best = std::abs(tf.at_frequency(0.0));
  best = std::max(best, std::abs(tf.at_frequency(1e9)));
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::abs(tf.at_frequency(lo * std::exp(step * i))));
  return best;
}

}  // namespace test_support
