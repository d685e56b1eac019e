#include "tdlhf/quadrature.hpp"

#include <numeric>

namespace tdlhf::quad {

void QuadSpec::validate() const {
  if (!(rel_tol > 0.0))
    throw DomainError("QuadSpec: rel_tol must be positive");
  if (!(abs_tol >= 0.0))
    throw DomainError("QuadSpec: abs_tol must be non-negative");
  if (max_subdivisions < 1)
    throw DomainError("QuadSpec: max_subdivisions must be >= 1");
  if (!(pv_window > 0.0))
    throw DomainError("QuadSpec: pv_window must be positive");
  for (std::size_t i = 0; i < eta_ladder.size(); ++i) {
    if (!(eta_ladder[i] > 0.0))
      throw DomainError("QuadSpec: eta_ladder entries must be positive");
    if (i > 0 && !(eta_ladder[i] < eta_ladder[i - 1]))
      throw DomainError("QuadSpec: eta_ladder must be strictly decreasing");
  }
}

std::vector<Cell2D>
split_rectangle(double x0, double x1, double y0, double y1,
                std::vector<double> x_splits,
                const std::vector<std::function<double(double)>> &curves) {
  if (!(x0 < x1) || !(y0 < y1))
    throw DomainError("split_rectangle: empty rectangle");
  std::vector<double> xs{x0};
  for (double s : x_splits)
    if (s > x0 && s < x1)
      xs.push_back(s);
  xs.push_back(x1);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto clamp_curve = [y0, y1](const std::function<double(double)> &c) {
    return std::function<double(double)>(
        [c, y0, y1](double x) { return std::clamp(c(x), y0, y1); });
  };

  std::vector<Cell2D> cells;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mid = 0.5 * (xs[i] + xs[i + 1]);
    std::vector<std::function<double(double)>> bounds;
    bounds.emplace_back([y0](double) { return y0; });
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      const double v = curves[k](mid);
      if (v > y0 && v < y1)
        order.emplace_back(v, k);
    }
    std::sort(order.begin(), order.end());
    for (const auto &[v, k] : order)
      bounds.push_back(clamp_curve(curves[k]));
    bounds.emplace_back([y1](double) { return y1; });
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j)
      cells.push_back(Cell2D{xs[i], xs[i + 1], bounds[j], bounds[j + 1], {}});
  }
  return cells;
}

namespace {

// Neville evaluation at eta = 0 of the interpolating polynomial through
// (eta_i, v_i).
std::complex<double>
neville_at_zero(std::span<const std::pair<double, std::complex<double>>> pts) {
  std::vector<std::complex<double>> p;
  for (const auto &pt : pts)
    p.push_back(pt.second);
  const std::size_t n = pts.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) {
      const double xi = pts[i].first, xj = pts[i + m].first;
      p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
    }
  return p[0];
}

} // namespace

EtaExtrapolation
extrapolate_eta(std::span<const std::pair<double, std::complex<double>>> values,
                int order) {
  if (values.size() < 2)
    throw DomainError("extrapolate_eta: need at least two ladder points");
  if (order < 1)
    throw DomainError("extrapolate_eta: order must be >= 1");

  std::vector<std::pair<double, std::complex<double>>> pts(values.begin(),
                                                           values.end());
  std::sort(pts.begin(), pts.end(),
            [](const auto &l, const auto &r) { return l.first < r.first; });

  EtaExtrapolation out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].first > 0.0))
      out.ill_conditioned = true;
    if (i > 0 && !(pts[i].first > pts[i - 1].first))
      out.ill_conditioned = true;
  }
  if (out.ill_conditioned) {
    out.value = pts.front().second;
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }

  const std::size_t used =
      std::min<std::size_t>(static_cast<std::size_t>(order) + 1, pts.size());
  std::span<const std::pair<double, std::complex<double>>> sel(pts.data(), used);
  out.value = neville_at_zero(sel);
  out.residual = std::abs(out.value - neville_at_zero(sel.first(used - 1)));

  // Lebesgue-type amplification of sample noise by the extrapolation weights.
  double amplification = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    double l = 1.0;
    for (std::size_t j = 0; j < used; ++j)
      if (j != i)
        l *= sel[j].first / (sel[j].first - sel[i].first);
    amplification += std::abs(l);
  }
  out.ill_conditioned = amplification > 1e3;
  return out;
}

} // namespace tdlhf::quad
