#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "tdlhf/errors.hpp"
#include "tdlhf/oracle.hpp"
#include "tdlhf/response_kernel.hpp"
#include "tdlhf/special_integrals.hpp"

using namespace tdlhf;
using doctest::Approx;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

TEST_CASE("OracleSpec invariants") {
  oracle::OracleSpec s;
  CHECK_NOTHROW(s.validate());
  s.radial_nodes = 4;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = {};
  s.cutoff_over_kF = 2.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = {};
  s.eta_over_epsF = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("oracle limits") {
  const auto p = heg::from_rs(2.0);
  oracle::OracleSpec s;
  CHECK(oracle::a_oracle(p, 1e-8 * p.k_F, s) == Approx(p.n0).epsilon(1e-4));
  CHECK(oracle::c_oracle(p, 0.0, s) == Approx(p.k_F / (kPi * kPi)).epsilon(1e-6));
  for (double y : {-0.5, 0.4}) {
    const double k = 0.6 * p.k_F;
    CHECK(oracle::b_oracle(p, 1e-6 * p.k_F, k, y, s) ==
          Approx(oracle::c_oracle(p, k, s)).epsilon(1e-4));
  }
  CHECK(oracle::b_oracle(p, 2.5 * p.k_F, 0.3 * p.k_F, 0.1, s) == 0.0);
}

TEST_CASE("oracle refinement decreases the error") {
  const auto p = heg::from_rs(2.0);
  const double q = 0.9 * p.k_F;
  const double exact = special::a_of_q(p, q);
  oracle::OracleSpec coarse, fine;
  coarse.radial_nodes = coarse.angular_nodes = 200;
  fine.radial_nodes = fine.angular_nodes = 800;
  const double e1 = std::abs(oracle::a_oracle(p, q, coarse) - exact);
  const double e2 = std::abs(oracle::a_oracle(p, q, fine) - exact);
  CHECK(std::log(e1 / e2) / std::log(4.0) >= 1.0);
}

TEST_CASE("k-sum Lindhard function") {
  const auto p = heg::from_rs(5.0);
  oracle::OracleSpec s;
  const double eta = s.eta_over_epsF * p.eps_F;
  const double pts[3][2] = {{0.5, 0.3}, {1.0, 1.2}, {1.8, 2.5}};
  for (const auto &[qr, wr] : pts) {
    const double q = qr * p.k_F, w = wr * p.eps_F;
    const cd ref = response::chi_s(p, q, w, eta);
    const cd sum = oracle::chi_s_ksum(p, q, w, eta, s);
    INFO("q " << qr << " omega " << wr);
    CHECK(std::abs(sum - ref) / std::abs(ref) < 1e-3);
  }
}

TEST_CASE("TDHF reference without a drive keeps the dipole") {
  const auto g = grid::Grid1D::make(-15.0, 15.0, 160);
  const grid::Interaction w;
  grid::StaticPotential v;
  const grid::Vec v0 = v.sample(g);
  const auto hf = oracle::hf_n2_ground_state(g, w, v0);
  CHECK(hf.orbitals.orthonormality_error(g) < 1e-12);
  CHECK(hf.eigenvalue < 0.0);
  grid::PropagationOptions opt;
  opt.dt = 0.02;
  opt.n_steps = 100;
  const auto tr = oracle::tdhf_n2(g, w, v0, grid::Drive{}, hf.orbitals, opt);
  for (const auto &pt : tr.points)
    CHECK(std::abs(pt.dipole - tr.points.front().dipole) < 1e-9);
  grid::OrbitalSet two = hf.orbitals;
  two.occupations = {1};
  CHECK_THROWS_AS(oracle::tdhf_n2(g, w, v0, grid::Drive{}, two, opt), DomainError);
}
