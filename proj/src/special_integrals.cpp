#include "tdlhf/special_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdlhf/errors.hpp"

namespace tdlhf::special {

using std::numbers::pi;

namespace {

constexpr double kTwoOver8Pi3 = 2.0 / (8.0 * pi * pi * pi);
constexpr double kTwoOver4Pi2 = 2.0 / (4.0 * pi * pi);

// sum_{m>=1} t^{2m} / (4m^2 - 1), for t^2 <= 1/4.
double even_tail(double t) {
  const double t2 = t * t;
  double term = t2, sum = 0.0;
  for (int m = 1; m < 60; ++m) {
    const double add = term / (4.0 * m * m - 1.0);
    sum += add;
    if (add < 1e-18 * sum)
      break;
    term *= t2;
  }
  return sum;
}

double x_of_k1(double kF, double q, double k1) {
  return (kF * kF - k1 * k1 - q * q) / (2.0 * k1 * q);
}

// Single-fold part of B: 2/(2pi)^2 \int_{|kF-q|}^{kF} P dk1. The k1 range is
// cut at k1 = k, where P has an interior logarithmic singularity, and each
// piece is integrated with endpoint clustering.
double b_single_fold(double kF, const BArgs &a, const quad::QuadSpec &spec) {
  const double lo = std::abs(kF - a.q), hi = kF;
  if (!(lo < hi))
    return 0.0;
  // P is O(1); near y = 1 and k -> |kF - q| the fold itself can be far
  // smaller than that, so an absolute floor on the natural scale is added.
  const quad::QuadSpec fold = spec.with_abs_tol(
      std::max(spec.abs_tol / kTwoOver4Pi2, 0.1 * spec.rel_tol * (hi - lo)));
  quad::QuadResult<double> r;
  if (a.k == 0.0) {
    // P -> 1 + x as k -> 0: the shell contributes its solid-angle fraction.
    auto g = [&](double k1) {
      return 1.0 + std::clamp(x_of_k1(kF, a.q, k1), -1.0, 1.0);
    };
    r = quad::integrate_1d_clustered(g, lo, hi, fold);
  } else {
    // Nodes within roundoff of k1 == k sit on the integrable logarithmic
    // singularity and are dropped; they carry no weight in the limit.
    auto f = [&](double k1) {
      return std::abs(k1 - a.k) <= 1e-14 * a.k
                 ? 0.0
                 : p_func(a.k, k1, x_of_k1(kF, a.q, k1), a.y);
    };
    if (a.k > lo && a.k < hi) {
      const double cut[] = {a.k};
      r = quad::integrate_1d_clustered(f, lo, hi, fold, cut);
    } else {
      r = quad::integrate_1d_clustered(f, lo, hi, fold);
    }
  }
  if (!r.converged)
    throw ConvergenceError("b_of_qk: k1 quadrature did not converge",
                           r.err_estimate);
  return kTwoOver4Pi2 * r.value;
}

void check_b_args(const BArgs &a) {
  if (!(a.q >= 0.0) || !(a.k >= 0.0) || !(std::abs(a.y) <= 1.0))
    throw DomainError("B arguments require q >= 0, k >= 0, |y| <= 1");
}

} // namespace

double a_of_q(const heg::HegParams &p, double q) {
  if (!(q >= 0.0))
    throw DomainError("a_of_q: q must be non-negative");
  const double kF = p.k_F;
  if (q >= 2.0 * kF)
    return 0.0;
  const double d = 2.0 * kF - q;
  return d * d * (4.0 * kF + q) / (48.0 * pi * pi);
}

double h_func(double k, double p) {
  if (!(k >= 0.0) || !(p > 0.0))
    throw DomainError("h_func: require k >= 0 and p > 0");
  if (k < kSmallK * p)
    return 4.0 * pi * p * (1.0 - even_tail(k / p));
  if (k > kLargeK * p)
    return 4.0 * pi * p * even_tail(p / k);
  const double d = p - k;
  if (std::abs(d) < kNearP * p) {
    // (p^2 - k^2) log|(p+k)/(p-k)| written as d (p+k) [log(p+k) - log|d|];
    // the product vanishes with d.
    const double dlog =
        d == 0.0 ? 0.0 : d * (p + k) * (std::log(p + k) - std::log(std::abs(d)));
    return (pi / k) * (dlog + 2.0 * k * p);
  }
  return (pi / k) *
         ((p * p - k * k) * std::log(std::abs((p + k) / d)) + 2.0 * k * p);
}

double c_of_k(const heg::HegParams &p, double k) {
  if (!(k >= 0.0))
    throw DomainError("c_of_k: k must be non-negative");
  return kTwoOver8Pi3 * h_func(k, p.k_F);
}

double p_func(double k, double k1, double x, double y) {
  if (!(k > 0.0) || !(k1 > 0.0) || !(std::abs(y) <= 1.0))
    throw DomainError("p_func: require k > 0, k1 > 0, |y| <= 1");
  if (std::abs(x) > 1.0) {
    if (std::abs(x) > 1.0 + 1e-12 || !std::isfinite(x))
      throw DomainError("p_func: |x| exceeds 1 beyond roundoff");
    x = std::copysign(1.0, x);
  }
  const double t = k / k1;
  if (t < 1e-3) {
    // log(num / den) is 1 + O(t); expand instead of losing digits.
    const double x2 = x * x, y2 = y * y, xm = (x - 1.0) * (x + 1.0);
    const double c1 = y * xm;
    const double c2 = (x + 1.0) * (6.0 * x2 * y2 - 2.0 * x2 - 6.0 * x * y2 + 2.0 * x + 1.0) / 3.0;
    const double c3 = y * xm * (5.0 * x2 * y2 - 3.0 * x2 - y2 + 1.0);
    const double c4 = (x + 1.0) *
                      (70.0 * x2 * x2 * y2 * y2 - 60.0 * x2 * x2 * y2 + 6.0 * x2 * x2 -
                       70.0 * x2 * x * y2 * y2 + 60.0 * x2 * x * y2 - 6.0 * x2 * x -
                       30.0 * x2 * y2 * y2 + 30.0 * x2 * y2 - 4.0 * x2 +
                       30.0 * x * y2 * y2 - 30.0 * x * y2 + 4.0 * x + 1.0) /
                      5.0;
    return 1.0 + x + t * (c1 + t * (c2 + t * (c3 + t * c4)));
  }
  const double kk = k * k + k1 * k1;
  const double diff2 = (k * k - k1 * k1) * (k * k - k1 * k1);
  // v = y (k^2 + k1^2) - 2 k k1 x; the radicand equals v^2 + (1-y^2)(k^2-k1^2)^2.
  double v = y * kk - 2.0 * k * k1 * x;
  if (y == 1.0)
    v = std::max(v, 0.0); // (k - k1)^2 + 2 k k1 (1 - x) >= 0 up to roundoff
  const double s = std::sqrt(v * v + (1.0 - y * y) * diff2);
  double num, den;
  if (v > 0.0) {
    // s - v = (1-y^2)(k^2-k1^2)^2 / (s + v); the (1-y)(k-k1)^2 factor cancels.
    num = (1.0 + y) * (k + k1) * (k + k1);
    den = s + v;
  } else {
    num = s - v;
    den = (1.0 - y) * (k - k1) * (k - k1);
  }
  if (!(num > 0.0) || !(den > 0.0))
    throw DomainError("p_func: evaluated on a logarithmic singularity");
  return k1 / (2.0 * k) * std::log(num / den);
}

double p_func_literal(double k, double k1, double x, double y) {
  const double rad = k * k * k * k + 4.0 * k * k * k1 * k1 * x * x +
                     2.0 * k * k1 *
                         (k * k1 * (2.0 * y * y - 1.0) -
                          2.0 * x * y * (k * k + k1 * k1)) +
                     k1 * k1 * k1 * k1;
  const double first = std::sqrt(rad) + 2.0 * k * k1 * x - y * (k * k + k1 * k1);
  const double second = (1.0 - y) * (k - k1) * (k - k1);
  return k1 / (2.0 * k) * (std::log(first) - std::log(second));
}

double b_of_qk(const heg::HegParams &p, const BArgs &args,
               const quad::QuadSpec &spec) {
  check_b_args(args);
  const double kF = p.k_F;
  if (args.q >= 2.0 * kF)
    return 0.0;
  if (args.q == 0.0)
    return c_of_k(p, args.k);
  const double ball = args.q < kF ? kTwoOver8Pi3 * h_func(args.k, kF - args.q) : 0.0;
  return ball + b_single_fold(kF, args, spec);
}

double b_minus_c(const heg::HegParams &p, const BArgs &args,
                 const quad::QuadSpec &spec) {
  check_b_args(args);
  const double kF = p.k_F;
  if (args.q >= 2.0 * kF)
    return -c_of_k(p, args.k);
  if (args.q == 0.0)
    return 0.0;
  const double hdiff =
      (args.q < kF ? h_func(args.k, kF - args.q) : 0.0) - h_func(args.k, kF);
  return kTwoOver8Pi3 * hdiff + b_single_fold(kF, args, spec);
}

} // namespace tdlhf::special
