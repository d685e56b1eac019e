#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "tdlhf/errors.hpp"
#include "tdlhf/oracle.hpp"
#include "tdlhf/special_integrals.hpp"

using namespace tdlhf;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
const quad::QuadSpec tight{.rel_tol = 1e-11, .abs_tol = 1e-15};
} // namespace

TEST_CASE("A(q) closed form") {
  const auto p = heg::from_rs(2.0);
  const double kF = p.k_F;
  CHECK(special::a_of_q(p, 0.0) == Approx(p.n0).epsilon(1e-14));
  CHECK(special::a_of_q(p, 2.0 * kF) == 0.0);
  CHECK(special::a_of_q(p, 3.0 * kF) == 0.0);
  // (1 - x/2)^2 (1 + x/4) n0 near x = 2: no cancellation
  CHECK(special::a_of_q(p, 2.0 * kF * (1.0 - 1e-9)) ==
        Approx(1.5e-18 * p.n0).epsilon(1e-6));
  double prev = p.n0;
  for (int i = 1; i <= 50; ++i) {
    const double q = 2.0 * kF * i / 50.0;
    const double a = special::a_of_q(p, q);
    CHECK(a >= 0.0);
    CHECK(a <= prev);
    prev = a;
    CHECK(p.n0 - a ==
          Approx(q * (12.0 * kF * kF - q * q) / (48.0 * pi * pi)).epsilon(1e-10));
  }
  oracle::OracleSpec o;
  o.radial_nodes = o.angular_nodes = 2000;
  CHECK(rel(oracle::a_oracle(p, kF, o), special::a_of_q(p, kF)) < 1e-3);
  CHECK_THROWS_AS(special::a_of_q(p, -1.0), DomainError);
}

TEST_CASE("H(k, p) limits and branch switches") {
  const double pp = 1.3;
  CHECK(special::h_func(0.0, pp) == Approx(4.0 * pi * pp).epsilon(1e-14));
  CHECK(special::h_func(1e-6 * pp, pp) == Approx(4.0 * pi * pp).epsilon(1e-8));
  CHECK(special::h_func(pp, pp) == Approx(2.0 * pi * pp).epsilon(1e-14));
  for (double d : {1e-7, -1e-7, 1e-4, -1e-4}) {
    const double kd = pp * (1.0 + d);
    const long double k = kd, P = pp;
    const long double lit =
        (std::numbers::pi_v<long double> / k) *
        ((P * P - k * k) * std::log(std::abs((P + k) / (P - k))) + 2.0L * k * P);
    CHECK(special::h_func(kd, pp) ==
          Approx(static_cast<double>(lit)).epsilon(1e-12));
  }
  const double big = 4.0 * pi * pp * pp * pp / (3.0 * 100.0 * pp * pp);
  CHECK(rel(special::h_func(10.0 * pp, pp), big) < 0.01);
  CHECK(rel(special::h_func(40.0 * pp, pp), 4.0 * pi * pp * pp * pp / (3.0 * 1600.0 * pp * pp)) <
        rel(special::h_func(10.0 * pp, pp), big));

  // both sides of every switch agree
  for (double k : {special::kSmallK * pp, (1.0 - special::kNearP) * pp,
                   (1.0 + special::kNearP) * pp, special::kLargeK * pp}) {
    const double below = special::h_func(k * (1.0 - 1e-12), pp);
    const double above = special::h_func(k * (1.0 + 1e-12), pp);
    CHECK(rel(below, above) < 1e-9);
  }
}

TEST_CASE("C(k)") {
  const auto p = heg::from_rs(2.0);
  const double kF = p.k_F;
  CHECK(special::c_of_k(p, 0.0) == Approx(kF / (pi * pi)).epsilon(1e-14));
  double prev = special::c_of_k(p, 0.0);
  for (int i = 1; i <= 40; ++i) {
    const double c = special::c_of_k(p, 0.1 * i * kF);
    CHECK(c > 0.0);
    CHECK(c < prev);
    prev = c;
  }
  const double k = 200.0 * kF;
  CHECK(special::c_of_k(p, k) * k * k == Approx(p.n0).epsilon(1e-4));
  oracle::OracleSpec o;
  CHECK(rel(oracle::c_oracle(p, 0.7 * kF, o), special::c_of_k(p, 0.7 * kF)) < 1e-6);
}

TEST_CASE("P(k, k1, x, y)") {
  // y = -1 is regular
  CHECK(std::isfinite(special::p_func(0.4, 0.9, 0.2, -1.0)));
  // roundoff excursions of x are clamped, real ones rejected
  CHECK(special::p_func(0.4, 0.9, 1.0 + 1e-14, 0.3) == special::p_func(0.4, 0.9, 1.0, 0.3));
  CHECK_THROWS_AS(special::p_func(0.4, 0.9, 1.01, 0.3), DomainError);
  CHECK_THROWS_AS(special::p_func(0.5, 0.5, 1.0, 1.0), DomainError);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double k = 0.05 + 2.0 * u(rng), k1 = 0.05 + 2.0 * u(rng);
    const double x = 2.0 * u(rng) - 1.0, y = 1.98 * u(rng) - 0.99;
    const double rad = k * k * k * k + 4.0 * k * k * k1 * k1 * x * x +
                       2.0 * k * k1 * (k * k1 * (2 * y * y - 1) - 2 * x * y * (k * k + k1 * k1)) +
                       k1 * k1 * k1 * k1;
    if (!(std::sqrt(rad) + 2.0 * k * k1 * x - y * (k * k + k1 * k1) > 0.0))
      ++bad;
    if (std::abs(k - k1) > 0.05)
      worst = std::max(worst, std::abs(special::p_func(k, k1, x, y) -
                                       special::p_func_literal(k, k1, x, y)));
  }
  CHECK(bad == 0);
  CHECK(worst < 1e-10);
}

TEST_CASE("P small k / k1 series joins the log form") {
  for (double x : {-0.9, -0.2, 0.5, 0.99})
    for (double y : {-0.95, 0.0, 0.7}) {
      const double k1 = 1.0;
      const double below = special::p_func(0.999999e-3 * k1, k1, x, y);
      const double above = special::p_func(1.000001e-3 * k1, k1, x, y);
      CHECK(std::abs(below - above) < 1e-8);
    }
}

TEST_CASE("B(q, k, y)") {
  const auto p = heg::from_rs(2.0);
  const double kF = p.k_F;
  CHECK(special::b_of_qk(p, {2.0 * kF, 0.5 * kF, 0.1}, tight) == 0.0);
  CHECK(special::b_of_qk(p, {2.5 * kF, 0.5 * kF, 0.1}, tight) == 0.0);
  for (double k : {0.0, 0.3, 0.9, 1.2, 2.0})
    for (double y : {-1.0, -0.3, 0.4, 1.0}) {
      const double b = special::b_of_qk(p, {1e-6 * kF, k * kF, y}, tight);
      CHECK(rel(b, special::c_of_k(p, k * kF)) < 1e-4);
    }
  oracle::OracleSpec o;
  const double fast = special::b_of_qk(p, {0.5 * kF, 0.8 * kF, 0.3}, tight);
  CHECK(rel(oracle::b_oracle(p, 0.5 * kF, 0.8 * kF, 0.3, o), fast) < 1e-4);
  // B - C assembled directly
  for (double q : {0.3, 1.2, 2.4})
    for (double k : {0.2, 1.1}) {
      const special::BArgs a{q * kF, k * kF, 0.35};
      CHECK(special::b_minus_c(p, a, tight) ==
            Approx(special::b_of_qk(p, a, tight) - special::c_of_k(p, a.k)).epsilon(1e-9));
    }
  CHECK_THROWS_AS(special::b_of_qk(p, {0.5, 0.5, 1.5}, tight), DomainError);
  CHECK_THROWS_AS(special::b_of_qk(p, {-0.5, 0.5, 0.5}, tight), DomainError);
}

TEST_CASE("B on a lattice against the brute-force integral") {
  const auto p = heg::from_rs(5.0);
  const double kF = p.k_F;
  oracle::OracleSpec o;
  o.radial_nodes = o.angular_nodes = 400;
  double worst = 0.0;
  for (double q : {0.3, 1.1, 1.7})
    for (double k : {0.2, 0.95, 1.6})
      for (double y : {-0.6, 0.5})
        worst = std::max(worst, rel(oracle::b_oracle(p, q * kF, k * kF, y, o),
                                    special::b_of_qk(p, {q * kF, k * kF, y}, tight)));
  CHECK(worst < 1e-3);
}

TEST_CASE("B near its singular corners") {
  // k1 == k at the lower fold end with y = 1 once made the fold evaluate the
  // logarithm exactly on its singularity.
  const auto p = heg::from_rs(5.0);
  const double kF = p.k_F, q = 0.5 * kF;
  for (double k : {std::nextafter(kF - q, 0.0), kF - q, std::nextafter(kF - q, 1.0)})
    for (double y : {1.0, std::nextafter(1.0, 0.0), -1.0})
      CHECK(std::isfinite(special::b_of_qk(p, {q, k, y}, tight)));
}
