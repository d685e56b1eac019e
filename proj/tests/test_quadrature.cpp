#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "tdlhf/errors.hpp"
#include "tdlhf/heg_model.hpp"
#include "tdlhf/quadrature.hpp"
#include "tdlhf/response_kernel.hpp"

using namespace tdlhf;
using doctest::Approx;
using cd = std::complex<double>;

TEST_CASE("QuadSpec invariants") {
  quad::QuadSpec s;
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS(s.with_rel_tol(0.0).validate(), DomainError);
  CHECK_THROWS_AS(s.with_abs_tol(-1.0).validate(), DomainError);
  s.max_subdivisions = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = {};
  s.eta_ladder = {1e-2, 2e-2};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.eta_ladder = {1e-2, 0.0};
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("integrate_1d") {
  quad::QuadSpec s;
  s.rel_tol = 1e-12;
  auto one = quad::integrate_1d([](double) { return 1.0; }, 0.0, 1.0, s);
  CHECK(one.converged);
  CHECK(std::abs(one.value - 1.0) < 1e-14);

  int at_end = 0;
  auto lg = quad::integrate_1d(
      [&](double x) {
        if (x == 0.0 || x == 1.0)
          ++at_end;
        return std::log(x);
      },
      0.0, 1.0, s.with_rel_tol(1e-10));
  CHECK(at_end == 0);
  CHECK(std::abs(lg.value + 1.0) < 1e-9);

  // converged implies the estimate meets the tolerance
  auto osc = quad::integrate_1d([](double x) { return std::sin(30 * x); }, 0.0, 2.0, s);
  CHECK(osc.converged);
  CHECK(osc.err_estimate <= std::max(s.rel_tol * std::abs(osc.value), s.abs_tol));
  CHECK(osc.value == Approx((1.0 - std::cos(60.0)) / 30.0).epsilon(1e-12));

  // complex integrand, breakpoint on a kink
  const double brk[] = {0.3};
  auto kink = quad::integrate_1d(
      [](double x) { return cd(std::abs(x - 0.3), x); }, 0.0, 1.0, s, brk);
  CHECK(kink.value.real() == Approx(0.5 * (0.09 + 0.49)).epsilon(1e-13));
  CHECK(kink.value.imag() == Approx(0.5).epsilon(1e-13));

  // budget too small: reported, not hidden
  quad::QuadSpec tiny = s;
  tiny.max_subdivisions = 2;
  auto hard = quad::integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                 tiny.with_rel_tol(1e-14));
  CHECK_FALSE(hard.converged);
  CHECK_THROWS_AS(quad::integrate_1d([](double) { return 1.0; }, 1.0, 1.0, s), DomainError);
}

TEST_CASE("integrate_1d_clustered") {
  quad::QuadSpec s;
  s.rel_tol = 1e-12;
  auto r = quad::integrate_1d_clustered([](double x) { return std::log(x * (1 - x)); },
                                        0.0, 1.0, s);
  CHECK(r.value == Approx(-2.0).epsilon(1e-11));
  const double cut[] = {0.4};
  auto c = quad::integrate_1d_clustered(
      [](double x) { return std::log(std::abs(x - 0.4)); }, 0.0, 1.0, s, cut);
  const double exact = 0.4 * std::log(0.4) - 0.4 + 0.6 * std::log(0.6) - 0.6;
  CHECK(c.value == Approx(exact).epsilon(1e-11));
}

TEST_CASE("integrate_2d_split") {
  quad::QuadSpec s;
  s.rel_tol = 1e-11;
  auto cells = quad::split_rectangle(0.0, 1.0, 0.0, 1.0, {0.5}, {});
  auto one = quad::integrate_2d_split([](double, double) { return 1.0; }, cells, s);
  CHECK(one.value == Approx(1.0).epsilon(1e-13));

  // step at x = kF, split there
  const double kF = 0.6;
  auto step_cells = quad::split_rectangle(0.0, 1.0, -1.0, 1.0, {kF}, {});
  auto st = quad::integrate_2d_split(
      [&](double x, double y) { return (x <= kF ? 1.0 : 0.0) * x * x * (1 + y); },
      step_cells, s);
  CHECK(st.value == Approx(2.0 * kF * kF * kF / 3.0).epsilon(1e-12));

  // diagonal split y = x: integrate |x - y| on the unit square = 1/3
  auto diag = quad::split_rectangle(0.0, 1.0, 0.0, 1.0, {},
                                    {[](double x) { return x; }});
  auto d = quad::integrate_2d_split([](double x, double y) { return std::abs(x - y); },
                                    diag, s);
  CHECK(d.value == Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("principal_value") {
  quad::QuadSpec s;
  s.rel_tol = 1e-12;
  s.abs_tol = 1e-14;
  auto g1 = [](double) { return 1.0; };
  CHECK(std::abs(quad::principal_value(g1, 0.0, -1.0, 1.0, s).value) < 1e-12);
  CHECK(std::abs(quad::principal_value(g1, 1.0, 0.0, 2.0, s).value) < 1e-12);
  auto gx = [](double x) { return x; };
  CHECK(std::abs(quad::principal_value(gx, 1.0, 0.0, 2.0, s).value - 2.0) < 1e-10);
  // asymmetric interval: PV \int_0^3 dx / (x - 1) = log 2
  CHECK(quad::principal_value(g1, 1.0, 0.0, 3.0, s).value ==
        Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(quad::principal_value(g1, 2.0, 0.0, 2.0, s), DomainError);
}

TEST_CASE("extrapolate_eta") {
  std::vector<std::pair<double, cd>> lin, quadr;
  for (double e : {4e-2, 2e-2, 1e-2}) {
    lin.emplace_back(e, cd(1.5 - 3.0 * e, 0.25 + e));
    quadr.emplace_back(e, cd(-0.7 + 2.0 * e + 30.0 * e * e, 0.0));
  }
  auto l = quad::extrapolate_eta(lin, 1);
  CHECK(std::abs(l.value - cd(1.5, 0.25)) < 1e-13);
  auto q = quad::extrapolate_eta(quadr, 2);
  CHECK(std::abs(q.value - cd(-0.7, 0.0)) < 1e-13);
  CHECK_THROWS_AS(quad::extrapolate_eta(std::span(lin).first(1), 1), DomainError);

  std::vector<std::pair<double, cd>> close{{1e-2, 1.0}, {1e-2 * (1 - 1e-15), 1.0}};
  CHECK(quad::extrapolate_eta(close, 1).ill_conditioned);

  // static Lindhard ladder against the closed form at eta = 0
  const auto p = heg::from_rs(3.0);
  const double qv = 0.5 * p.k_F;
  std::vector<std::pair<double, cd>> ladder;
  for (double e : {1e-2, 5e-3, 2.5e-3})
    ladder.emplace_back(e, response::chi_s(p, qv, 0.0, e * p.eps_F));
  const cd ex = quad::extrapolate_eta(ladder, 2).value;
  CHECK(std::abs(ex - response::chi_s_limit(p, qv, 0.0)) /
            std::abs(response::chi_s_limit(p, qv, 0.0)) <
        1e-6);
}
