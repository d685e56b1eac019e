#include "tdlhf/response_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "tdlhf/errors.hpp"
#include "tdlhf/special_integrals.hpp"

namespace tdlhf::response {

using std::numbers::pi;

namespace {

void require_q(const heg::HegParams &p, double q) {
  if (!(q >= kQMinOverKF * p.k_F * (1.0 - 1e-9)) || !std::isfinite(q))
    throw DomainError("response: q below the small-q guard (use the closed-form "
                      "limits for q < 1e-3 k_F)");
}

// The two resonant denominators of the linearized equation along y = cos
// angle(k, q) at fixed k:  1/(a1 - beta y) - 1/(a2 + beta y),
// a1 = omega - q^2/2 + i eta, a2 = omega + q^2/2 + i eta, beta = k q.
// eta == 0 is the +i0 boundary value.
struct Resonance {
  cd a1, a2;
  double beta = 0.0;
  double q2 = 0.0; // a2 - a1

  Resonance(double q, double omega, double eta, double k)
      : a1(omega - 0.5 * q * q, eta), a2(omega + 0.5 * q * q, eta), beta(k * q),
        q2(q * q) {}

  // The difference of the two fractions, formed over a common denominator;
  // its numerator q^2 + 2 beta y carries no cancellation.
  cd operator()(double y) const {
    return (q2 + 2.0 * beta * y) / (cd(a1.real() - beta * y, a1.imag()) *
                                    cd(a2.real() + beta * y, a2.imag()));
  }

  // \int_lo^hi dy / (a1 - beta y)
  cd int_minus(double lo, double hi) const {
    return -(std::log(cd(a1.real() - beta * hi, a1.imag())) -
             std::log(cd(a1.real() - beta * lo, a1.imag()))) /
           beta;
  }
  // \int_lo^hi dy / (a2 + beta y)
  cd int_plus(double lo, double hi) const {
    return (std::log(cd(a2.real() + beta * hi, a2.imag())) -
            std::log(cd(a2.real() + beta * lo, a2.imag()))) /
           beta;
  }

  // \int_lo^hi [1/(a1 - beta y) - 1/(a2 + beta y)] dy. Far from both poles
  // the two terms nearly cancel; expand in beta y / a there so the O(q^2)
  // difference keeps full relative precision.
  cd window(double lo, double hi) const {
    const double reach = beta * std::max(std::abs(lo), std::abs(hi));
    if (reach < 0.25 * std::min(std::abs(a1), std::abs(a2)))
      return window_series(lo, hi);
    return int_minus(lo, hi) - int_plus(lo, hi);
  }

  cd window_series(double lo, double hi) const {
    const cd inv1 = 1.0 / a1, inv2 = 1.0 / a2;
    const cd inv12 = inv1 * inv2;
    cd sum{};
    double bpow = 1.0;  // beta^n
    double lo_pow = lo; // lo^(n+1)
    double hi_pow = hi;
    cd inv1_pow = inv1; // a1^-(n+1)
    cd inv2_pow = inv2;
    // Running sum_{i=0}^{p-1} a2^i a1^(p-1-i) / (a1 a2)^p for p = n + 1,
    // i.e. (a1^-p - a2^-p) / (a2 - a1), updated as
    // g_{p+1} = inv1 * g_p + inv2^(p+1) ... (closed recursion below).
    cd g = inv12; // p = 1
    for (int n = 0; n < 60; ++n) {
      const double m = (hi_pow - lo_pow) / (n + 1);
      cd term;
      if (n % 2 == 0)
        term = q2 * g;
      else
        term = inv1_pow + inv2_pow;
      const cd add = bpow * m * term;
      sum += add;
      if (n > 4 && std::abs(add) < 1e-18 * std::abs(sum))
        break;
      // advance p -> p + 1:  (a1^-(p+1) - a2^-(p+1)) / (a2 - a1)
      //   = inv1 * (a1^-p - a2^-p)/(a2 - a1) + a2^-p * (inv1 - inv2)/(a2 - a1)
      //   = inv1 * g_p + a2^-p * inv12.
      g = inv1 * g + inv2_pow * inv12;
      inv1_pow *= inv1;
      inv2_pow *= inv2;
      bpow *= beta;
      lo_pow *= lo;
      hi_pow *= hi;
    }
    return sum;
  }
};

// Derived tolerances are kept above what double-precision Gauss-Kronrod
// sums can certify.
double floored(double tol, double floor) { return std::max(tol, floor); }

// Upper edge of the region k > k_F, |k + q| < k_F in the y variable.
double y_edge(double kF, double q, double k) {
  return (kF * kF - k * k - q * q) / (2.0 * k * q);
}

std::vector<double> in_range(std::initializer_list<double> pts, double lo,
                             double hi) {
  std::vector<double> out;
  for (double v : pts)
    if (std::isfinite(v) && v > lo && v < hi)
      out.push_back(v);
  return out;
}

struct Parts {
  quad::QuadResult<cd> c_part, shell_part, d_part;
};

// k-space integral of the linearized equation, split as
//   B = C(k) + [B - C](k, y)   for k < k_F (y-integral of C analytic),
//   C(k)                       for k > k_F, |k + q| < k_F (analytic in y),
// leaving a 2D quadrature only over the O(q) remainder B - C.
class RatioIntegrand {
public:
  RatioIntegrand(const heg::HegParams &p, double q, double omega, double eta,
                 bool static_pv, const quad::QuadSpec &spec)
      : p_(p), q_(q), omega_(omega), eta_(eta), static_pv_(static_pv),
        spec_(spec) {
    spec_.validate();
    // At small q the three parts cancel to a fraction ~ q / k_F of their
    // size; tolerances are tightened by that factor.
    cancel_ = std::min(1.0, q / p.k_F);
    inner_b_ = spec_.with_rel_tol(floored(0.1 * spec_.rel_tol * cancel_, 1e-10))
                   .with_abs_tol(0.0);
  }

  Parts evaluate() {
    Parts out;
    const double kF = p_.k_F, q = q_, s = 0.5 * q * q, w = omega_;
    const auto pole_pts = {std::abs(w - s) / q, (w + s) / q,
                           std::sqrt(std::max(0.0, kF * kF - 2.0 * w)),
                           std::sqrt(kF * kF + 2.0 * w), (s - w) / q, q / 2.0,
                           std::abs(kF - q)};
    const quad::QuadSpec line =
        spec_.with_rel_tol(floored(spec_.rel_tol * cancel_, 1e-12));

    // For q >= 2 k_F, B vanishes and the k < k_F terms cancel exactly.
    if (q < 2.0 * kF) {
      auto c_row = [&](double k) -> cd {
        Resonance r(q, w, eta_, k);
        return k * k * special::c_of_k(p_, k) * r.window(-1.0, 1.0);
      };
      const auto c_breaks = in_range(pole_pts, 0.0, kF);
      out.c_part = quad::integrate_1d_clustered(c_row, 0.0, kF, line, c_breaks);
    }

    const double k_lo = std::max(kF, q - kF), k_hi = kF + q;
    auto shell_row = [&](double k) -> cd {
      const double top = std::min(1.0, y_edge(kF, q, k));
      if (!(top > -1.0))
        return cd{};
      Resonance r(q, w, eta_, k);
      return k * k * special::c_of_k(p_, k) * r.window(-1.0, top);
    };
    const auto shell_breaks = in_range(pole_pts, k_lo, k_hi);
    out.shell_part =
        quad::integrate_1d_clustered(shell_row, k_lo, k_hi, line, shell_breaks);

    if (q < 2.0 * kF) {
      const double scale = std::abs(out.c_part.value) + std::abs(out.shell_part.value);
      const double d_abs =
          std::max(spec_.abs_tol, spec_.rel_tol * cancel_ * scale);
      row_spec_ = spec_.with_rel_tol(floored(0.1 * spec_.rel_tol * cancel_, 1e-11))
                      .with_abs_tol(0.3 * d_abs / (kF * kF * kF));
      quad::Cell2D cell{0.0, kF, [](double) { return -1.0; },
                        [](double) { return 1.0; }, in_range(pole_pts, 0.0, kF),
                        true};
      auto row = [&](double k, double lo, double hi) {
        auto r = d_row(k, lo, hi);
        r.value *= k * k;
        r.err_estimate *= k * k;
        return r;
      };
      out.d_part = quad::integrate_2d_rows(
          row, {cell}, line.with_abs_tol(d_abs));
    }
    return out;
  }

private:
  double d_of(double k, double y) const {
    return special::b_minus_c(p_, {q_, k, y}, inner_b_);
  }

  // \int over y of [B - C](k, y) times the resonant factor, for one k.
  quad::QuadResult<cd> d_row(double k, double lo, double hi) const {
    const double kF = p_.k_F;
    std::array<double, 3> cuts{lo, hi, hi};
    int n_pieces = 1;
    const double edge = y_edge(kF, q_, k);
    if (edge > lo && edge < hi) {
      cuts = {lo, edge, hi};
      n_pieces = 2;
    }
    quad::QuadResult<cd> total;
    for (int i = 0; i < n_pieces; ++i)
      total += static_pv_ ? d_piece_pv(k, cuts[i], cuts[i + 1])
                          : d_piece(k, cuts[i], cuts[i + 1]);
    return total;
  }

  // Pole subtraction: for each denominator whose real zero lies within one
  // piece length of [lo, hi], D(y_pole) / denominator is removed from the
  // integrand and added back in closed form. Distant poles are left alone;
  // subtracting them would trade the O(q^2) integrand for a difference of
  // O(1) terms. The pieces end on the logarithmic kinks of D, so they are
  // integrated with endpoint clustering.
  quad::QuadResult<cd> d_piece(double k, double lo, double hi) const {
    const Resonance r(q_, omega_, eta_, k);
    const double len = hi - lo;
    const double p1 = r.a1.real() / r.beta, p2 = -r.a2.real() / r.beta;
    const bool sub1 = p1 > lo - len && p1 < hi + len;
    const bool sub2 = p2 > lo - len && p2 < hi + len;
    const double y1 = std::clamp(p1, lo, hi), y2 = std::clamp(p2, lo, hi);
    const double d1 = sub1 ? d_of(k, y1) : 0.0;
    const double d2 = !sub2 ? 0.0 : (sub1 && y2 == y1) ? d1 : d_of(k, y2);
    auto f = [&](double y) -> cd {
      const double d = d_of(k, y);
      cd v = d * r(y);
      if (sub1)
        v -= d1 / cd(r.a1.real() - r.beta * y, r.a1.imag());
      if (sub2)
        v += d2 / cd(r.a2.real() + r.beta * y, r.a2.imag());
      return v;
    };
    std::array<double, 2> br{};
    std::size_t nb = 0;
    if (sub1)
      br[nb++] = y1;
    if (sub2)
      br[nb++] = y2;
    auto res = quad::integrate_1d_clustered(f, lo, hi, row_spec_,
                                            std::span<const double>(br.data(), nb));
    if (sub1)
      res.value += d1 * r.int_minus(lo, hi);
    if (sub2)
      res.value -= d2 * r.int_plus(lo, hi);
    return res;
  }

  // omega = 0, eta -> 0: the two denominators merge into -2 / (s + beta y),
  // a real principal value about y = c = -s / beta. The singular part
  // D(c) / (y - c) is subtracted and integrated in closed form.
  quad::QuadResult<cd> d_piece_pv(double k, double lo, double hi) const {
    const double s = 0.5 * q_ * q_, beta = k * q_;
    const double c = -s / beta;
    quad::QuadResult<double> res;
    if (c > lo && c < hi) {
      const double dc = d_of(k, c);
      auto f = [&](double y) { return (d_of(k, y) - dc) / (y - c); };
      const double br[] = {c};
      res = quad::integrate_1d_clustered(f, lo, hi, row_spec_, br);
      res.value += dc * std::log((hi - c) / (c - lo));
      res.value *= -2.0 / beta;
      res.err_estimate *= 2.0 / beta;
    } else {
      auto f = [&](double y) { return -2.0 * d_of(k, y) / (s + beta * y); };
      res = quad::integrate_1d_clustered(f, lo, hi, row_spec_);
    }
    return {cd(res.value, 0.0), res.err_estimate, res.subdivisions_used,
            res.converged};
  }

  const heg::HegParams &p_;
  double q_, omega_, eta_;
  bool static_pv_;
  double cancel_ = 1.0;
  quad::QuadSpec spec_, inner_b_, row_spec_;
};

quad::QuadResult<cd> assemble(const heg::HegParams &p, double q, Parts parts) {
  const double denom = pi * (p.n0 - special::a_of_q(p, q));
  quad::QuadResult<cd> r = parts.c_part;
  r += parts.shell_part;
  r += parts.d_part;
  r.value /= denom;
  r.err_estimate /= std::abs(denom);
  if (!r.converged)
    throw ConvergenceError("ratio_vx_vs: quadrature did not converge",
                           r.err_estimate);
  return r;
}

} // namespace

cd chi_s(const heg::HegParams &p, double q, double omega, double eta) {
  if (!(q > 0.0))
    throw DomainError("chi_s: q must be positive");
  if (!(eta > 0.0))
    throw DomainError("chi_s: eta must be positive");
  // chi = 2/(2pi)^3 \int_{k<kF} d^3k [1/(z - D) - 1/(z + D)],
  // D = k q y + q^2/2, which the window integral already encodes.
  const double kF = p.k_F;
  const double u = kF * q;
  const cd a(omega - 0.5 * q * q, eta), b(omega + 0.5 * q * q, eta);
  // J(a) = \int_0^kF (k/q) log((a + kq)/(a - kq)) dk
  //      = [((U^2 - a^2)/2) (log(a+U) - log(a-U)) + a U] / q^3.
  if (u < 0.4 * std::min(std::abs(a), std::abs(b))) {
    // J(a) - J(b) = (2/q^3) sum_m U^(2m+1) (a^(1-2m) - b^(1-2m)) / (4m^2-1).
    const cd ia = 1.0 / a, ib = 1.0 / b, iab = ia * ib;
    // g_p = (a^-p - b^-p) / (b - a); a^(1-2m) - b^(1-2m) = q^2 g_{2m-1}.
    cd g = iab; // p = 1
    cd ib_pow = ib;
    double upow = u * u * u;
    cd sum{};
    for (int m = 1; m < 80; ++m) {
      const cd add = upow * (q * q) * g / (4.0 * m * m - 1.0);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum))
        break;
      // p -> p + 2
      for (int step = 0; step < 2; ++step) {
        g = ia * g + ib_pow * iab;
        ib_pow *= ib;
      }
      upow *= u * u;
    }
    return (2.0 / (q * q * q)) * sum / (2.0 * pi * pi);
  }
  auto j = [&](cd z) {
    const cd lp = std::log(cd(z.real() + u, z.imag()));
    const cd lm = std::log(cd(z.real() - u, z.imag()));
    return (0.5 * (u * u - z * z) * (lp - lm) + z * u) / (q * q * q);
  };
  return (j(a) - j(b)) / (2.0 * pi * pi);
}

cd chi_s_limit(const heg::HegParams &p, double q, double omega) {
  if (!(q > 0.0))
    throw DomainError("chi_s: q must be positive");
  const double u = p.k_F * q;
  const cd a(omega - 0.5 * q * q, 0.0), b(omega + 0.5 * q * q, 0.0);
  auto j = [&](cd z) {
    // at z = +-u the prefactor vanishes and x log x -> 0 takes the log with it
    const cd pre = 0.5 * (u * u - z * z);
    if (pre == 0.0)
      return z * u / (q * q * q);
    const cd lp = std::log(cd(z.real() + u, +0.0));
    const cd lm = std::log(cd(z.real() - u, +0.0));
    return (pre * (lp - lm) + z * u) / (q * q * q);
  };
  if (u < 0.4 * std::min(std::abs(a), std::abs(b)))
    return chi_s(p, q, omega, 1e-300);
  return (j(a) - j(b)) / (2.0 * pi * pi);
}

quad::QuadResult<cd> ratio_vx_vs(const heg::HegParams &p, double q,
                                 double omega, double eta,
                                 const quad::QuadSpec &spec) {
  require_q(p, q);
  if (!(eta > 0.0))
    throw DomainError("ratio_vx_vs: eta must be positive");
  RatioIntegrand integrand(p, q, omega, eta, false, spec);
  return assemble(p, q, integrand.evaluate());
}

cd f_x(const heg::HegParams &p, double q, double omega, double eta,
       const quad::QuadSpec &spec) {
  const cd chi = chi_s(p, q, omega, eta);
  if (std::abs(chi) < 1e-300)
    throw DomainError("f_x: chi_s vanishes");
  return ratio_vx_vs(p, q, omega, eta, spec).value / chi;
}

quad::EtaExtrapolation f_x_eta_extrapolated(const heg::HegParams &p, double q,
                                            double omega,
                                            const quad::QuadSpec &spec,
                                            int order) {
  spec.validate();
  std::vector<std::pair<double, cd>> pts;
  for (double e : spec.eta_ladder)
    pts.emplace_back(e, f_x(p, q, omega, e * p.eps_F, spec));
  return quad::extrapolate_eta(pts, order);
}

ComplexResponseSample sample(const heg::HegParams &p, double q, double omega,
                             double eta, const quad::QuadSpec &spec) {
  ComplexResponseSample s;
  s.q = q;
  s.omega = omega;
  s.eta = eta;
  s.chi_s = chi_s(p, q, omega, eta);
  s.ratio = ratio_vx_vs(p, q, omega, eta, spec).value;
  s.f_x = s.ratio / s.chi_s;
  s.epsilon = epsilon_from(q, s.chi_s, s.f_x).value;
  return s;
}

Dielectric epsilon_from(double q, cd chi, cd fx) {
  Dielectric d;
  d.screening = 1.0 + chi * fx;
  const double scale = 1.0 + std::abs(chi * fx);
  if (std::abs(d.screening) <= 1e-14 * scale) {
    d.at_pole = true;
    d.value = cd(std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::quiet_NaN());
    return d;
  }
  d.value = 1.0 - (4.0 * pi / (q * q)) * chi / d.screening;
  return d;
}

Dielectric epsilon(const heg::HegParams &p, double q, double omega, double eta,
                   const quad::QuadSpec &spec) {
  const cd chi = chi_s(p, q, omega, eta);
  const cd ratio = ratio_vx_vs(p, q, omega, eta, spec).value;
  return epsilon_from(q, chi, ratio / chi);
}

cd epsilon_lindhard(const heg::HegParams &p, double q, double omega,
                    double eta) {
  return 1.0 - (4.0 * pi / (q * q)) * chi_s(p, q, omega, eta);
}

quad::QuadResult<double> ratio_static(const heg::HegParams &p, double q,
                                      const quad::QuadSpec &spec) {
  require_q(p, q);
  RatioIntegrand integrand(p, q, 0.0, 0.0, true, spec);
  const auto r = assemble(p, q, integrand.evaluate());
  return {r.value.real(), r.err_estimate, r.subdivisions_used, r.converged};
}

double f_x_static(const heg::HegParams &p, double q,
                  const quad::QuadSpec &spec) {
  return ratio_static(p, q, spec).value / chi_s_limit(p, q, 0.0).real();
}

double fx_limit_q0_finite_omega(const heg::HegParams &p) {
  return -3.0 * pi / (4.0 * p.k_F * p.k_F);
}

double fx_limit_omega0_q0(const heg::HegParams &p) {
  return -pi / (p.k_F * p.k_F);
}

StaticLimit fx_static_q0_numeric(const heg::HegParams &p,
                                 const quad::QuadSpec &spec,
                                 double q0_over_kF) {
  std::vector<std::pair<double, cd>> pts;
  for (double f : {1.0, 0.5, 0.25}) {
    const double q = q0_over_kF * f * p.k_F;
    pts.emplace_back(q / p.k_F, f_x_static(p, q, spec) * p.k_F * p.k_F);
  }
  const auto ex = quad::extrapolate_eta(pts, 2);
  return {ex.value.real(), ex.residual};
}

ShearModulus mu_x(const heg::HegParams &p) {
  ShearModulus m;
  const double jump = fx_limit_q0_finite_omega(p) - fx_limit_omega0_q0(p);
  m.mu_au = 0.75 * p.n0 * p.n0 * jump;
  m.mu_in_2wpln = m.mu_au / (2.0 * p.omega_pl * p.n0);
  return m;
}

double mu_x_coefficient() {
  return 3.0 * std::cbrt(1.5 * 1.5) / (64.0 * std::pow(pi, 5.0 / 3.0));
}

} // namespace tdlhf::response
