#include <cmath>
#include <numbers>
#include <tuple>

#include <doctest.h>

#include "tdlhf/errors.hpp"
#include "tdlhf/heg_model.hpp"

using namespace tdlhf;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

TEST_CASE("gas constants") {
  const auto p1 = heg::from_rs(1.0);
  CHECK(p1.n0 == Approx(0.238732).epsilon(1e-6));
  CHECK(2.0 * p1.omega_pl * p1.n0 == Approx(0.826993).epsilon(1e-6));
  CHECK(heg::from_rs(5.0).k_F == Approx(0.383831).epsilon(1e-5));

  for (double rs : {0.3, 1.0, 2.0, 4.0, 5.0, 20.0}) {
    const auto p = heg::from_rs(rs);
    CHECK(p.r_s == rs);
    CHECK(p.k_F == Approx(std::cbrt(9.0 * pi / 4.0) / rs).epsilon(1e-15));
    CHECK(p.n0 == Approx(p.k_F * p.k_F * p.k_F / (3.0 * pi * pi)).epsilon(1e-14));
    CHECK(p.n0 == Approx(3.0 / (4.0 * pi * rs * rs * rs)).epsilon(1e-14));
    CHECK(p.omega_pl == Approx(std::sqrt(4.0 * pi * p.n0)).epsilon(1e-15));
    CHECK(p.eps_F == Approx(0.5 * p.k_F * p.k_F).epsilon(1e-15));
  }
}

TEST_CASE("bad r_s") {
  CHECK_THROWS_AS(heg::from_rs(0.0), DomainError);
  CHECK_THROWS_AS(heg::from_rs(-1.0), DomainError);
  CHECK_THROWS_AS(heg::from_rs(std::nan("")), DomainError);
  CHECK_THROWS_AS(heg::from_rs(INFINITY), DomainError);
}

TEST_CASE("occupation") {
  const auto p = heg::from_rs(2.0);
  CHECK(heg::occupation(p, 0.0) == 1);
  CHECK(heg::occupation(p, p.k_F) == 1);
  CHECK(heg::occupation(p, 2.0 * p.k_F) == 0);
  CHECK(heg::occupation(p, std::nextafter(p.k_F, 10.0)) == 0);
  CHECK_THROWS_AS(heg::occupation(p, -1e-9), DomainError);
}

TEST_CASE("particle-hole continuum") {
  const auto p = heg::from_rs(3.0);
  const double kF = p.k_F, kF2 = kF * kF;
  auto [lo, hi] = heg::ph_continuum_bounds(p, 0.5 * kF);
  CHECK(lo == 0.0);
  CHECK(hi == Approx(0.625 * kF2).epsilon(1e-15));
  std::tie(lo, hi) = heg::ph_continuum_bounds(p, 2.0 * kF);
  CHECK(lo == 0.0);
  CHECK(hi == Approx(4.0 * kF2).epsilon(1e-15));
  std::tie(lo, hi) = heg::ph_continuum_bounds(p, 3.0 * kF);
  CHECK(lo == Approx(1.5 * kF2).epsilon(1e-15));
  CHECK(hi == Approx(7.5 * kF2).epsilon(1e-15));
  for (double q : {0.01, 0.7, 1.99, 2.01, 5.0}) {
    std::tie(lo, hi) = heg::ph_continuum_bounds(p, q * kF);
    CHECK(lo < hi);
    CHECK((lo == 0.0) == (q <= 2.0));
  }
  CHECK_THROWS_AS(heg::ph_continuum_bounds(p, 0.0), DomainError);
}
