#include "tdlhf/oracle.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <vector>

#include "tdlhf/errors.hpp"
#include "tdlhf/special_integrals.hpp"

namespace tdlhf::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPrefactor = 2.0 / (8.0 * kPi * kPi * kPi); // 2/(2pi)^3

using Vec3 = std::array<double, 3>;

double dot(const Vec3 &a, const Vec3 &b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool empty() const { return !(hi > lo); }
};

// Part of the ray from `from` along unit `u` (r >= 0) inside the ball.
Interval ray_in_ball(const Vec3 &from, const Vec3 &u, const Vec3 &centre,
                     double radius) {
  const Vec3 d{from[0] - centre[0], from[1] - centre[1], from[2] - centre[2]};
  const double b = dot(u, d);
  const double c = dot(d, d) - radius * radius;
  const double disc = b * b - c;
  if (disc <= 0.0)
    return {};
  const double s = std::sqrt(disc);
  return {std::max(0.0, -b - s), -b + s};
}

// Angular integral of the ray length inside every ball at once, midpoint in
// cos(theta) about z and in phi.
double ray_integral(const Vec3 &from, const std::vector<Vec3> &centres,
                    double radius, int n_theta, int n_phi) {
  const double dc = 2.0 / n_theta;
  const double dphi = 2.0 * kPi / n_phi;
  std::vector<double> rows(static_cast<std::size_t>(n_theta), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_theta; ++i) {
    const double ct = -1.0 + (i + 0.5) * dc;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double row = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const Vec3 u{st * std::cos(phi), st * std::sin(phi), ct};
      Interval in{0.0, std::numeric_limits<double>::infinity()};
      for (const auto &c : centres) {
        const Interval r = ray_in_ball(from, u, c, radius);
        in.lo = std::max(in.lo, r.lo);
        in.hi = std::min(in.hi, r.hi);
      }
      if (!in.empty())
        row += in.hi - in.lo;
    }
    rows[static_cast<std::size_t>(i)] = row;
  }
  double s = 0.0;
  for (double r : rows)
    s += r;
  return s * dc * dphi;
}

// Integral over u in [-h/2, h/2] of (g0 + g1 u) / (zc + b u), Im zc > 0.
cd cell_pole(cd zc, double b, double h, double g0, double g1) {
  const cd r = 0.5 * b * h / zc;
  cd i0, i1; // moments 1 and u
  if (std::abs(r) < 1e-3) {
    i0 = h / zc * (1.0 + r * r / 3.0);
    i1 = -b * h * h * h / (12.0 * zc * zc) * (1.0 + 0.6 * r * r);
  } else {
    i0 = (std::log(zc + 0.5 * b * h) - std::log(zc - 0.5 * b * h)) / b;
    i1 = (h - zc * i0) / b;
  }
  return g0 * i0 + g1 * i1;
}

} // namespace

void OracleSpec::validate() const {
  if (radial_nodes < 8 || angular_nodes < 8 || ksum_nodes_per_kF < 8)
    throw DomainError("OracleSpec: node counts must be >= 8");
  if (!(cutoff_over_kF >= 3.0))
    throw DomainError("OracleSpec: cutoff must be >= 3 k_F");
  if (!(eta_over_epsF > 0.0))
    throw DomainError("OracleSpec: eta must be positive");
}

double a_oracle(const heg::HegParams &p, double q, const OracleSpec &spec) {
  spec.validate();
  const int nk = spec.radial_nodes, ny = spec.angular_nodes;
  const double dk = p.k_F / nk, dy = 2.0 / ny;
  double s = 0.0;
  for (int i = 0; i < nk; ++i) {
    const double k = (i + 0.5) * dk;
    double row = 0.0;
    for (int j = 0; j < ny; ++j) {
      const double y = -1.0 + (j + 0.5) * dy;
      const double kq = std::sqrt(std::max(0.0, k * k + q * q + 2.0 * k * q * y));
      row += heg::occupation(p, k) * heg::occupation(p, kq);
    }
    s += k * k * row;
  }
  return kPrefactor * 2.0 * kPi * s * dk * dy;
}

double c_oracle(const heg::HegParams &p, double k, const OracleSpec &spec) {
  spec.validate();
  // Axially symmetric about k: phi contributes 2 pi exactly.
  const int n_theta = spec.radial_nodes * spec.angular_nodes;
  return kPrefactor * ray_integral({0.0, 0.0, k}, {{0.0, 0.0, 0.0}}, p.k_F,
                                   n_theta, 1);
}

double b_oracle(const heg::HegParams &p, double q, double k, double y,
                const OracleSpec &spec) {
  spec.validate();
  const double s = std::sqrt(std::max(0.0, 1.0 - y * y));
  // f(k1 + q): k1 inside the ball of radius k_F about -q.
  return kPrefactor * ray_integral({k * s, 0.0, k * y},
                                   {{0.0, 0.0, 0.0}, {0.0, 0.0, -q}}, p.k_F,
                                   spec.angular_nodes, spec.radial_nodes);
}

cd chi_s_ksum(const heg::HegParams &p, double q, double omega, double eta,
              const OracleSpec &spec) {
  spec.validate();
  const double kc = spec.cutoff_over_kF * p.k_F;
  const int n = 2 * static_cast<int>(std::lround(spec.cutoff_over_kF)) *
                spec.ksum_nodes_per_kF;
  const double dk = 2.0 * kc / n;
  // 2/V sum_k with V = (2 pi / dk)^3
  const double weight = 2.0 * dk * dk * dk / (8.0 * kPi * kPi * kPi);
  const double kf2 = p.k_F * p.k_F;
  std::vector<cd> slabs(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int ix = 0; ix < n; ++ix) {
    const double kx = -kc + (ix + 0.5) * dk;
    cd slab{};
    for (int iy = 0; iy < n; ++iy) {
      const double ky = -kc + (iy + 0.5) * dk;
      const double perp = kx * kx + ky * ky;
      if (perp > kf2)
        continue; // neither k nor k + q inside the Fermi sphere
      for (int iz = 0; iz < n; ++iz) {
        const double kz = -kc + (iz + 0.5) * dk;
        const double k2 = perp + kz * kz;
        const double kq2 = perp + (kz + q) * (kz + q);
        const int fk = k2 <= kf2 ? 1 : 0;
        const int fkq = kq2 <= kf2 ? 1 : 0;
        if (fk == fkq)
          continue;
        const cd den(omega - 0.5 * kq2 + 0.5 * k2, eta);
        slab += static_cast<double>(fk - fkq) / den;
      }
    }
    slabs[static_cast<std::size_t>(ix)] = slab;
  }
  cd s{};
  for (const cd &v : slabs)
    s += v;
  return weight * s;
}

cd ratio_riemann(const heg::HegParams &p, double q, double omega, double eta,
                 const OracleSpec &spec) {
  spec.validate();
  if (!(q > 0.0) || !(eta > 0.0))
    throw DomainError("ratio_riemann: need q > 0 and eta > 0");
  const double kF = p.k_F;
  const double k_max = kF + q;
  // k pieces split at k_F and where a resonance reaches y = +-1; on each
  // piece the midpoint rule runs in u with k = lo + len u^2 (3 - 2u), which
  // crowds nodes into the narrow features at the piece ends.
  std::vector<double> edges{0.0, kF, k_max};
  for (double e : {(omega - 0.5 * q * q) / q, -(omega - 0.5 * q * q) / q,
                   (omega + 0.5 * q * q) / q})
    if (e > 0.0 && e < k_max && std::abs(e - kF) > 1e-9 * kF)
      edges.push_back(e);
  std::sort(edges.begin(), edges.end());
  std::vector<double> nodes, weights;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e], len = edges[e + 1] - lo;
    const int n = std::max(8, static_cast<int>(std::lround(
                                  spec.radial_nodes * len / k_max)));
    for (int i = 0; i < n; ++i) {
      const double u = (i + 0.5) / n;
      nodes.push_back(lo + len * u * u * (3.0 - 2.0 * u));
      weights.push_back(len * 6.0 * u * (1.0 - u) / n);
    }
  }
  const int ny = spec.angular_nodes;
  const double dy = 2.0 / ny;
  const quad::QuadSpec bspec{.rel_tol = 1e-10, .abs_tol = 1e-14};
  const double a = special::a_of_q(p, q);

  const int nk = static_cast<int>(nodes.size());
  std::vector<cd> rows(static_cast<std::size_t>(nk));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nk; ++i) {
    const double k = nodes[static_cast<std::size_t>(i)];
    const double dk = weights[static_cast<std::size_t>(i)];
    const bool inside = k <= kF;
    const double c = inside ? 0.0 : special::c_of_k(p, k);
    auto numerator = [&](double y) {
      const double kq =
          std::sqrt(std::max(0.0, k * k + q * q + 2.0 * k * q * y));
      const int fk = heg::occupation(p, k), fkq = heg::occupation(p, kq);
      if (fk == 1)
        return special::b_of_qk(p, {q, k, y}, bspec);
      return -fkq * (fk - 1) * c;
    };
    // numerator linear across each y cell, denominators exact
    cd row{};
    double g_lo = numerator(-1.0);
    for (int j = 0; j < ny; ++j) {
      const double y = -1.0 + (j + 0.5) * dy;
      const double g_hi = numerator(std::min(1.0, -1.0 + (j + 1) * dy));
      if (g_lo != 0.0 || g_hi != 0.0) {
        const double g0 = 0.5 * (g_lo + g_hi), g1 = (g_hi - g_lo) / dy;
        // eps(k + q) - eps(k) = q^2/2 + k q y, linear in y
        const double de = 0.5 * q * q + k * q * y, b = k * q;
        row += cell_pole(cd(omega - de, eta), -b, dy, g0, g1) -
               cell_pole(cd(omega + de, eta), b, dy, g0, g1);
      }
      g_lo = g_hi;
    }
    rows[static_cast<std::size_t>(i)] = row * (k * k * dk);
  }
  cd s{};
  for (const cd &r : rows)
    s += r;
  return s / (kPi * (p.n0 - a));
}

HfResult hf_n2_ground_state(const grid::Grid1D &g, const grid::Interaction &w,
                            const grid::Vec &v0, double tol,
                            int max_iterations) {
  const int n = g.n_points;
  const double dx = g.dx;
  const double t_diag = 1.0 / (dx * dx), t_off = -0.5 / (dx * dx);
  grid::Mat wm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      wm(i, j) = w(g.x(i), g.x(j));

  grid::Vec v_hx = grid::Vec::Zero(n); // v_H / 2
  const grid::Vec off = grid::Vec::Constant(n - 1, t_off);
  Eigen::SelfAdjointEigenSolver<grid::Mat> es;
  for (int it = 1; it <= max_iterations; ++it) {
    const grid::Vec diag = v0 + v_hx + grid::Vec::Constant(n, t_diag);
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    grid::Vec phi = es.eigenvectors().col(0) / std::sqrt(dx);
    if (phi.sum() < 0.0)
      phi = -phi;
    const grid::Vec dens = 2.0 * phi.cwiseAbs2();
    const grid::Vec target = 0.5 * dx * (wm * dens);
    const double change = (target - v_hx).cwiseAbs().maxCoeff();
    if (change < tol) {
      HfResult r;
      r.orbitals.psi = phi.cast<cd>();
      r.orbitals.occupations = {2};
      r.eigenvalue = es.eigenvalues()(0);
      r.iterations = it;
      double kin = 0.0;
      for (int i = 0; i < n; ++i) {
        const double lap = (i > 0 ? phi(i - 1) : 0.0) - 2.0 * phi(i) +
                           (i + 1 < n ? phi(i + 1) : 0.0);
        kin += -0.5 * phi(i) * lap / (dx * dx);
      }
      // 2 <T> + int v0 n + (1/2 - 1/4) int int n w n
      const double ee = dx * dx * dens.dot(wm * dens);
      r.energy = 2.0 * dx * kin + dx * v0.dot(dens) + 0.25 * ee;
      return r;
    }
    v_hx += 0.5 * (target - v_hx);
  }
  throw ConvergenceError("hf_n2_ground_state: no convergence", tol);
}

grid::Trajectory tdhf_n2(const grid::Grid1D &g, const grid::Interaction &w,
                         const grid::Vec &v0, const grid::Drive &drive,
                         const grid::OrbitalSet &initial,
                         const grid::PropagationOptions &opt) {
  if (initial.occupations.size() != 1 || initial.occupations[0] != 2)
    throw DomainError("tdhf_n2: needs one doubly occupied orbital");
  return grid::propagate(g, w, v0, drive, initial, opt,
                         grid::ExchangeModel::tdhf_single_orbital);
}

} // namespace tdlhf::oracle
