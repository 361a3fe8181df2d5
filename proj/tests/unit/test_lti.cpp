#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "dcnet/balanced_truncation.hpp"
#include "dcnet/error.hpp"
#include "dcnet/hinf.hpp"
#include "dcnet/polynomial.hpp"
#include "dcnet/rational_function.hpp"
#include "dcnet/state_space.hpp"
#include "support.hpp"

using namespace dcnet;
using cd = std::complex<double>;

TEST_CASE("polynomial products") {
  CHECK(Polynomial{1, 1} * Polynomial{1, -1} == Polynomial{1, 0, -1});
  CHECK((Polynomial::s() * Polynomial{0.0}).is_zero());
  CHECK(Polynomial{1, 2} * Polynomial{3, 1} == Polynomial{3, 7, 2});
}

TEST_CASE("polynomial trimming and evaluation") {
  Polynomial p({2.0, 0.0, 0.0});
  CHECK(p.degree() == 0);
  CHECK(Polynomial().is_zero());
  const Polynomial q{1, -3, 2};  // (1 - s)(1 - 2s)
  CHECK(q(1.0) == doctest::Approx(0.0));
  CHECK(q(cd(0.5, 0.0)).real() == doctest::Approx(0.0));
  CHECK((q - q).is_zero());
  CHECK(q.origin_multiplicity(1e-12) == 0);
  CHECK(Polynomial({0, 0, 1, 2}).origin_multiplicity(1e-12) == 2);
  CHECK(Polynomial({0, 0, 1, 2}).divided_by_s(2) == Polynomial{1, 2});
}

TEST_CASE("polynomial roots round trip") {
  std::vector<cd> r = {{-1.0, 0.0}, {-2.0, 3.0}, {-2.0, -3.0}, {0.5, 0.0}};
  const Polynomial p = Polynomial::from_roots(r, 2.0);
  CHECK(p.leading() == doctest::Approx(2.0));
  auto got = p.roots();
  REQUIRE(got.size() == 4);
  for (const auto& want : r) {
    double best = 1e9;
    for (const auto& g : got) best = std::min(best, std::abs(g - want));
    CHECK(best < 1e-10);
  }
  CHECK(poly_quotient(p, Polynomial{1, 1}).degree() == 3);
}

TEST_CASE("rational function algebra") {
  const RationalFunction integ(Polynomial{1.0}, Polynomial::s());
  SUBCASE("integrator unity feedback") {
    const RationalFunction cl = tf_feedback(integ, 1.0);
    CHECK(cl.at_frequency(0.0).real() == doctest::Approx(1.0));
    const cd v = cl.at_frequency(2.0);
    CHECK(std::abs(v - 1.0 / cd(1.0, 2.0)) < 1e-14);
  }
  SUBCASE("open loop") {
    const RationalFunction cl = tf_feedback(RationalFunction(3.5), 0.0);
    CHECK(cl.at_frequency(10.0).real() == doctest::Approx(3.5));
  }
  SUBCASE("vanishing loop denominator") {
    CHECK_THROWS_AS(tf_feedback(1.0, -1.0), Error);
    try {
      tf_feedback(1.0, -1.0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AlgebraicLoop);
    }
  }
  SUBCASE("arithmetic agrees with pointwise evaluation") {
    const RationalFunction a(Polynomial{1, 2}, Polynomial{3, 1, 1});
    const RationalFunction b(Polynomial{-1, 0, 4}, Polynomial{2, 5, 1, 0.5});
    for (double w : {0.1, 1.0, 7.0}) {
      const cd s(0.0, w);
      CHECK(std::abs((a + b)(s) - (a(s) + b(s))) < 1e-12);
      CHECK(std::abs((a - b)(s) - (a(s) - b(s))) < 1e-12);
      CHECK(std::abs((a * b)(s) - (a(s) * b(s))) < 1e-12);
      CHECK(std::abs((a / b)(s) - (a(s) / b(s))) < 1e-10);
    }
  }
}

TEST_CASE("frequency response and dc gain") {
  const RationalFunction lp(Polynomial{1.0}, Polynomial{1.0, 1.0});
  const double w[] = {1.0};
  const FrequencyResponse fr = freq_response(lp, w);
  CHECK(std::abs(fr.values[0] - 1.0 / cd(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(fr.values[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));

  const DcGain integ = dc_gain(RationalFunction::integrator(500e-6));
  CHECK(integ.infinite);
  CHECK(integ.value > 0.0);

  // s / (s (s + 2)) cancels to 1/(s + 2)
  const RationalFunction c(Polynomial{0, 1}, Polynomial{0, 2, 1});
  const DcGain g = dc_gain(c);
  CHECK_FALSE(g.infinite);
  CHECK(g.value == doctest::Approx(0.5));

  const double on_pole[] = {1.0};
  CHECK_THROWS_AS(freq_response(RationalFunction(Polynomial{1.0}, Polynomial{1, 0, 1}), on_pole), Error);
}

TEST_CASE("stability test") {
  CHECK(is_stable(RationalFunction(Polynomial{1.0}, Polynomial{1.0, 1.0})));
  CHECK_FALSE(is_stable(RationalFunction(Polynomial{1.0}, Polynomial{-1.0, 1.0})));
  CHECK_FALSE(is_stable(RationalFunction::integrator(1.0)));
}

TEST_CASE("reduction cancels coincident roots") {
  const Polynomial common{3.0, 1.0};
  const RationalFunction f(Polynomial{1, 1} * common, Polynomial{2, 3, 1} * common);
  const RationalFunction r = f.reduced();
  CHECK(r.den().degree() == 1);  // (s+1)(s+3) / ((s+1)(s+2)(s+3)) -> 1/(s+2)
  CHECK(std::abs(r.at_frequency(1.3) - f.at_frequency(1.3)) < 1e-12);
}

TEST_CASE("logspace endpoints") {
  const auto g = logspace(1e-2, 1e6, 200);
  REQUIRE(g.size() == 200);
  CHECK(g.front() == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(1e6));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("state-space realization matches the transfer function") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const RationalFunction tf = test_support::random_stable_tf(rng, 1 + trial % 7);
    const StateSpaceModel ss = realize(tf);
    CHECK(ss.is_stable());
    for (double w : {0.0, 0.3, 2.0, 40.0}) {
      const cd want = tf.at_frequency(w);
      CHECK(std::abs(ss.response(w)(0, 0) - want) <= 1e-8 * std::max(1.0, std::abs(want)));
    }
  }
  CHECK_THROWS_AS(realize(RationalFunction(Polynomial{0, 0, 1}, Polynomial{1, 1})), Error);
  CHECK_THROWS_AS(StateSpaceModel(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 1),
                                  Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 1)),
                  Error);
}

TEST_CASE("H-infinity norm analytic cases") {
  CHECK(hinf_norm(RationalFunction(Polynomial{1.0}, Polynomial{1.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-6));
  const double zeta = 0.1;
  const double peak = 1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta));
  CHECK(peak == doctest::Approx(5.0252).epsilon(1e-4));
  CHECK(hinf_norm(RationalFunction(Polynomial{1.0}, Polynomial{1.0, 0.2, 1.0})) ==
        doctest::Approx(peak).epsilon(1e-6));
  CHECK(hinf_norm(RationalFunction(0.04)) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK_THROWS_AS(hinf_norm(RationalFunction(Polynomial{1.0}, Polynomial{-1.0, 1.0})), Error);
}

TEST_CASE("H-infinity norm against a dense grid oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const RationalFunction tf = test_support::random_stable_tf(rng, 1 + trial % 8);
    const double h = hinf_norm(tf);
    const double grid = test_support::dense_grid_peak(tf);
    // the grid can only under-estimate the supremum
    CHECK(grid <= h * (1.0 + 1e-6));
    CHECK(grid >= h * (1.0 - 1e-3));
  }
}

TEST_CASE("grid norm agrees with Hamiltonian bisection") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const RationalFunction tf = test_support::random_stable_tf(rng, 1 + trial % 6);
    TransferMatrix tm(1, 1);
    tm(0, 0) = tf;
    GridOptions g;
    g.omega_lo = 1e-4;
    g.omega_hi = 1e5;
    const double a = hinf_norm_grid(tm, g).norm;
    const double b = hinf_norm(tf);
    CHECK(std::abs(a - b) <= 1e-5 * b);
  }
}

TEST_CASE("MIMO norm is at least each entry's norm") {
  TransferMatrix tm(2, 2);
  tm(0, 0) = RationalFunction(Polynomial{1.0}, Polynomial{1.0, 1.0});
  tm(0, 1) = RationalFunction(Polynomial{2.0}, Polynomial{4.0, 1.0});
  tm(1, 0) = 0.0;
  tm(1, 1) = RationalFunction(Polynomial{1.0}, Polynomial{1.0, 0.2, 1.0});
  const double n = hinf_norm_grid(tm).norm;
  CHECK(n >= hinf_norm(tm(1, 1)) * (1.0 - 1e-9));
  // an unstable entry is refused
  tm(1, 0) = RationalFunction(Polynomial{1.0}, Polynomial{-2.0, 1.0});
  CHECK_THROWS_AS(hinf_norm_grid(tm), Error);
}

TEST_CASE("Lyapunov solver residual") {
  Eigen::MatrixXd A(3, 3);
  A << -1, 2, 0, 0, -3, 1, 0.5, 0, -2;
  const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd X = solve_lyapunov(A, Q);
  CHECK((A * X + X * A.transpose() + Q).norm() < 1e-12);
}

TEST_CASE("balanced truncation of a fast mode") {
  const RationalFunction slow(Polynomial{1.0}, Polynomial{1.0, 1.0});
  const RationalFunction fast(Polynomial{1000.0}, Polynomial{1000.0, 1.0});
  const StateSpaceModel ss = realize(slow * fast);
  const BalancedReduction r = balanced_truncate(ss, 1);
  REQUIRE(r.hankel_singular_values.size() == 2);
  CHECK(r.error_bound == doctest::Approx(2.0 * r.hankel_singular_values[1]));
  const double err = hinf_norm(difference(ss, r.reduced)).norm;
  CHECK(err <= r.error_bound * (1.0 + 1e-6));
  for (double w : {0.1, 1.0}) {
    CHECK(std::abs(r.reduced.response(w)(0, 0) - slow.at_frequency(w)) < 5e-3);
  }
}

TEST_CASE("balanced truncation to full order is a no-op") {
  std::mt19937_64 rng(5);
  const StateSpaceModel ss = realize(test_support::random_stable_tf(rng, 5));
  const BalancedReduction r = balanced_truncate(ss, 5);
  for (double w : {0.0, 0.5, 3.0, 100.0}) {
    CHECK(std::abs(r.reduced.response(w)(0, 0) - ss.response(w)(0, 0)) < 1e-9);
  }
  CHECK(r.error_bound == 0.0);
  CHECK_THROWS_AS(balanced_truncate(ss, 6), Error);
}

TEST_CASE("balanced truncation error bound holds on random systems") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 15; ++trial) {
    const StateSpaceModel ss = realize(test_support::random_stable_tf(rng, 8));
    const BalancedReduction r = balanced_truncate(ss, 6);
    const auto& hsv = r.hankel_singular_values;
    REQUIRE(hsv.size() == 8);
    for (std::size_t i = 1; i < hsv.size(); ++i) CHECK(hsv[i] <= hsv[i - 1] * (1.0 + 1e-9));
    CHECK(r.error_bound == doctest::Approx(2.0 * (hsv[6] + hsv[7])));
    const double err = hinf_norm(difference(ss, r.reduced)).norm;
    CHECK(err <= r.error_bound * (1.0 + 1e-6) + 1e-12);
  }
}
