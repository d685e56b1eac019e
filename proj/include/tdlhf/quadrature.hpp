#pragma once

// Adaptive one-dimensional quadrature built on the 21-point Gauss-Kronrod
// pair, plus the handful of derived drivers the response calculations need:
// endpoint-clustered integration, iterated 2D integration over cells split
// along kinks of the integrand, principal values and eta -> 0 extrapolation.
//
// All rules are open (no node sits on an interval endpoint), node placement is
// deterministic, and the final sum is taken in left-to-right interval order so
// results are bit-reproducible for a given QuadSpec.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "tdlhf/errors.hpp"

namespace tdlhf::quad {

struct QuadSpec {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_subdivisions = 400;
  // Half-width of the symmetric window used by principal_value(); infinity
  // means "as wide as the interval allows".
  double pv_window = std::numeric_limits<double>::infinity();
  // Broadening ladder for eta -> 0 extrapolation, in units of the Fermi
  // energy. Strictly decreasing, positive.
  std::vector<double> eta_ladder{1e-2, 5e-3, 2.5e-3};

  // Throws DomainError when an invariant is broken.
  void validate() const;

  QuadSpec with_rel_tol(double r) const {
    QuadSpec s = *this;
    s.rel_tol = r;
    return s;
  }
  QuadSpec with_abs_tol(double a) const {
    QuadSpec s = *this;
    s.abs_tol = a;
    return s;
  }
};

template <class T> struct QuadResult {
  T value{};
  double err_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = true;

  QuadResult &operator+=(const QuadResult &o) {
    value += o.value;
    err_estimate += o.err_estimate;
    subdivisions_used += o.subdivisions_used;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

// Kronrod abscissae (descending, last is the centre) and weights; Gauss
// weights belong to the odd-indexed abscissae.
inline constexpr std::array<double, 11> kXgk{
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk{
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980165183, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg{
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double> &v) { return std::abs(v); }

template <class T> struct Segment {
  double a, b;
  T value;
  double err;
  bool splittable;
};

// One application of the 21-point rule on [a, b].
template <class T, class F> Segment<T> gk21(F &f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<T, 21> fv;
  fv[10] = f(c);
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    fv[j] = f(c - dx);
    fv[20 - j] = f(c + dx);
  }
  T kron = fv[10] * kWgk[10];
  T gauss{};
  double resabs = magnitude(fv[10]) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    const T s = fv[j] + fv[20 - j];
    kron += s * kWgk[j];
    resabs += kWgk[j] * (magnitude(fv[j]) + magnitude(fv[20 - j]));
    if (j % 2 == 1)
      gauss += s * kWg[j / 2];
  }
  const T mean = kron * 0.5;
  double resasc = kWgk[10] * magnitude(fv[10] - mean);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (magnitude(fv[j] - mean) + magnitude(fv[20 - j] - mean));

  kron *= h;
  gauss *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = magnitude(kron - gauss);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  const bool splittable =
      std::abs(h) > 64.0 * eps * std::max(std::abs(a), std::abs(b)) &&
      std::abs(h) > 1e3 * std::numeric_limits<double>::min();
  return {a, b, kron, err, splittable};
}

template <class F> using result_of_t = std::decay_t<std::invoke_result_t<F &, double>>;

} // namespace detail

// Globally adaptive integration of f over [a, b]. Optional interior
// breakpoints seed the initial partition (kinks, steps, known singular
// points). Never evaluates f at a, b or at a breakpoint.
template <class F>
auto integrate_1d(F &&f, double a, double b, const QuadSpec &spec,
                  std::span<const double> breakpoints = {})
    -> QuadResult<detail::result_of_t<F>> {
  using T = detail::result_of_t<F>;
  using Seg = detail::Segment<T>;
  if (!(a < b))
    throw DomainError("integrate_1d: require a < b");

  std::vector<double> edges{a};
  for (double p : breakpoints)
    if (p > a && p < b)
      edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  auto by_err = [](const Seg &l, const Seg &r) { return l.err < r.err; };
  std::vector<Seg> heap;
  heap.reserve(static_cast<std::size_t>(spec.max_subdivisions) + edges.size());
  std::vector<Seg> frozen;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    heap.push_back(detail::gk21<T>(f, edges[i], edges[i + 1]));
  std::make_heap(heap.begin(), heap.end(), by_err);

  auto totals = [&] {
    T v{};
    double e = 0.0;
    for (const auto &s : heap) {
      v += s.value;
      e += s.err;
    }
    for (const auto &s : frozen) {
      v += s.value;
      e += s.err;
    }
    return std::pair<T, double>{v, e};
  };

  int subdivisions = static_cast<int>(heap.size());
  auto [value, err] = totals();
  auto tolerance = [&](const T &v) {
    return std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(v));
  };
  while (err > tolerance(value) && !heap.empty() &&
         subdivisions < spec.max_subdivisions) {
    std::pop_heap(heap.begin(), heap.end(), by_err);
    Seg worst = heap.back();
    heap.pop_back();
    if (!worst.splittable) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Seg left = detail::gk21<T>(f, worst.a, mid);
    Seg right = detail::gk21<T>(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_err);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_err);
    ++subdivisions;
  }

  // Deterministic left-to-right resummation.
  heap.insert(heap.end(), frozen.begin(), frozen.end());
  std::sort(heap.begin(), heap.end(),
            [](const Seg &l, const Seg &r) { return l.a < r.a; });
  T v{};
  double e = 0.0;
  for (const auto &s : heap) {
    v += s.value;
    e += s.err;
  }
  QuadResult<T> out;
  out.value = v;
  out.err_estimate = e;
  out.subdivisions_used = subdivisions;
  out.converged = e <= tolerance(v);
  return out;
}

// integrate_1d after the substitution x = a + (b - a) u^2 (3 - 2u), whose
// Jacobian vanishes at both ends. Logarithmic and square-root endpoint
// behaviour becomes smooth in u. With breakpoints, each piece between
// consecutive points is mapped separately.
template <class F>
auto integrate_1d_clustered(F &&f, double a, double b, const QuadSpec &spec,
                            std::span<const double> breakpoints = {})
    -> QuadResult<detail::result_of_t<F>> {
  using T = detail::result_of_t<F>;
  if (!(a < b))
    throw DomainError("integrate_1d_clustered: require a < b");
  std::vector<double> edges{a};
  for (double p : breakpoints)
    if (p > a && p < b)
      edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  QuadResult<T> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const double len = hi - lo;
    auto g = [&](double u) -> T {
      // measured from the nearer end so x stays strictly inside (lo, hi)
      const double x = u < 0.5 ? lo + len * u * u * (3.0 - 2.0 * u)
                               : hi - len * (1.0 - u) * (1.0 - u) * (1.0 + 2.0 * u);
      const double jac = 6.0 * len * u * (1.0 - u);
      return f(x) * jac;
    };
    out += integrate_1d(g, 0.0, 1.0, spec);
  }
  return out;
}

// One cell of an iterated 2D integral: x in [x_lo, x_hi], y between two
// curves that bound a region on which the integrand is smooth.
struct Cell2D {
  double x_lo = 0.0, x_hi = 0.0;
  std::function<double(double)> y_lo, y_hi;
  std::vector<double> x_breaks;
  // Integrate the outer variable with endpoint clustering on every piece
  // between breaks (for rows with log-type kinks at the breaks).
  bool cluster = false;
};

// Partition the rectangle [x0, x1] x [y0, y1] into cells. Vertical splits
// are given as x values; each curve y = c(x) is clamped into [y0, y1]. Curves
// must not cross inside a strip between consecutive vertical splits.
std::vector<Cell2D>
split_rectangle(double x0, double x1, double y0, double y1,
                std::vector<double> x_splits,
                const std::vector<std::function<double(double)>> &curves);

// Iterated integration over cells. `row(x, y_lo, y_hi)` returns the inner
// integral for a fixed x as a QuadResult; inner errors are folded into the
// reported estimate and inner non-convergence is propagated.
template <class Row>
auto integrate_2d_rows(Row &&row, const std::vector<Cell2D> &cells,
                       const QuadSpec &spec)
    -> std::decay_t<std::invoke_result_t<Row &, double, double, double>> {
  using R = std::decay_t<std::invoke_result_t<Row &, double, double, double>>;
  using T = decltype(R{}.value);
  R total{};
  for (const auto &cell : cells) {
    if (!(cell.x_lo < cell.x_hi))
      continue;
    double inner_err = 0.0;
    bool inner_ok = true;
    auto outer = [&](double x) -> T {
      const double lo = cell.y_lo(x), hi = cell.y_hi(x);
      if (!(lo < hi))
        return T{};
      R r = row(x, lo, hi);
      inner_err = std::max(inner_err, r.err_estimate);
      inner_ok = inner_ok && r.converged;
      return r.value;
    };
    auto res = cell.cluster ? integrate_1d_clustered(outer, cell.x_lo, cell.x_hi,
                                                     spec, cell.x_breaks)
                            : integrate_1d(outer, cell.x_lo, cell.x_hi, spec,
                                           cell.x_breaks);
    res.err_estimate += inner_err * (cell.x_hi - cell.x_lo);
    res.converged = res.converged && inner_ok;
    total += res;
  }
  return total;
}

// Iterated integration of a plain f(x, y) over split cells.
template <class F>
auto integrate_2d_split(F &&f, const std::vector<Cell2D> &cells,
                        const QuadSpec &spec) {
  using T = std::decay_t<std::invoke_result_t<F &, double, double>>;
  const QuadSpec inner = spec.with_rel_tol(0.1 * spec.rel_tol);
  auto row = [&](double x, double lo, double hi) {
    return integrate_1d([&](double y) -> T { return f(x, y); }, lo, hi, inner);
  };
  return integrate_2d_rows(row, cells, spec);
}

// Principal value of  PV \int_a^b g(x) / (x - c) dx  for a < c < b.
// The singular part is removed on the symmetric window |x - c| < w by
// folding, \int_0^w [g(c+t) - g(c-t)] / t dt; the remainder is regular.
template <class G>
auto principal_value(G &&g, double c, double a, double b, const QuadSpec &spec)
    -> QuadResult<detail::result_of_t<G>> {
  using T = detail::result_of_t<G>;
  if (!(a < c && c < b))
    throw DomainError("principal_value: singularity must lie inside (a, b)");
  const double w = std::min({spec.pv_window, c - a, b - c});
  auto folded = [&](double t) -> T { return (g(c + t) - g(c - t)) / t; };
  auto out = integrate_1d(folded, 0.0, w, spec);
  auto tail = [&](double x) -> T { return g(x) / (x - c); };
  if (c - w > a)
    out += integrate_1d(tail, a, c - w, spec);
  if (c + w < b)
    out += integrate_1d(tail, c + w, b, spec);
  return out;
}

struct EtaExtrapolation {
  std::complex<double> value;
  // |value - value obtained with one order less|.
  double residual = 0.0;
  bool ill_conditioned = false;
};

// Polynomial (in eta) extrapolation of samples to eta = 0 using the
// `order`+1 smallest etas. Requires at least two samples.
EtaExtrapolation
extrapolate_eta(std::span<const std::pair<double, std::complex<double>>> values,
                int order);

} // namespace tdlhf::quad
