#include "tdlhf/tdlhf_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "tdlhf/errors.hpp"

namespace tdlhf::grid {

Grid1D Grid1D::make(double x_min, double x_max, int n_points) {
  if (n_points < 16)
    throw DomainError("Grid1D: n_points must be >= 16");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw DomainError("Grid1D: require finite x_min < x_max");
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_points = n_points;
  g.dx = (x_max - x_min) / (n_points - 1);
  return g;
}

Vec Grid1D::coordinates() const {
  Vec x(n_points);
  for (int i = 0; i < n_points; ++i)
    x(i) = this->x(i);
  return x;
}

double Interaction::operator()(double x, double xp) const {
  const double d = x - xp;
  return strength / std::sqrt(d * d + softening * softening);
}

Mat Interaction::matrix(const Grid1D &g) const {
  if (!(softening > 0.0))
    throw DomainError("Interaction: softening must be positive");
  Mat w(g.n_points, g.n_points);
  for (int j = 0; j < g.n_points; ++j)
    for (int i = 0; i < g.n_points; ++i)
      w(i, j) = (*this)(g.x(i), g.x(j));
  return w;
}

int OrbitalSet::electron_count() const {
  return std::accumulate(occupations.begin(), occupations.end(), 0);
}

double OrbitalSet::orthonormality_error(const Grid1D &g) const {
  const CMat s = g.dx * (psi.adjoint() * psi);
  return (s - CMat::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

DensityMatrix DensityMatrix::from(const OrbitalSet &orbs) {
  const auto m = static_cast<Eigen::Index>(orbs.occupations.size());
  if (orbs.psi.cols() != m)
    throw DomainError("DensityMatrix: one occupation per orbital required");
  Eigen::Index n_down = 0;
  for (int o : orbs.occupations) {
    if (o != 1 && o != 2)
      throw DomainError("DensityMatrix: occupations must be 1 or 2");
    n_down += o == 2;
  }
  DensityMatrix dm;
  dm.up = orbs.psi;
  dm.down.resize(orbs.psi.rows(), n_down);
  Eigen::Index c = 0;
  for (Eigen::Index a = 0; a < m; ++a)
    if (orbs.occupations[static_cast<std::size_t>(a)] == 2)
      dm.down.col(c++) = orbs.psi.col(a);
  return dm;
}

CMat DensityMatrix::rho_up() const { return up * up.adjoint(); }
CMat DensityMatrix::rho_down() const { return down * down.adjoint(); }
CMat DensityMatrix::rho() const { return rho_up() + rho_down(); }

Vec DensityMatrix::density() const {
  Vec n = up.rowwise().squaredNorm();
  if (down.cols() > 0)
    n += down.rowwise().squaredNorm();
  return n;
}

Vec density(const OrbitalSet &orbs) { return DensityMatrix::from(orbs).density(); }

namespace {

std::vector<int> boundary_points(int n, double fraction) {
  const int per_side = std::max(1, static_cast<int>(std::floor(fraction * n)));
  std::vector<int> idx;
  for (int i = 0; i < per_side; ++i)
    idx.push_back(i);
  for (int i = n - per_side; i < n; ++i)
    idx.push_back(i);
  return idx;
}

} // namespace

ExchangeSolution solve_vx(const DensityMatrix &dm, const Vec &n, const Mat &w,
                          const Grid1D &g, const SolveOptions &opt) {
  const int np = g.n_points;
  if (n.size() != np || dm.up.rows() != np)
    throw DomainError("solve_vx: field sizes do not match the grid");
  const double n_electrons = static_cast<double>(dm.up.cols() + dm.down.cols());
  if (n_electrons < 1)
    throw DomainError("solve_vx: no occupied orbitals");
  const double dx = g.dx;
  const ExchangeKernel ker = opt.parallel ? assemble_kernel_parallel(dm, w, dx)
                                          : assemble_kernel_serial(dm, w, dx);
  const double n_max = n.maxCoeff();
  if (!(n_max > 0.0))
    throw DomainError("solve_vx: density vanishes everywhere");

  ExchangeSolution sol;
  for (int i = 0; i < np; ++i)
    sol.row_sum_error =
        std::max(sol.row_sum_error, std::abs(dx * ker.K.row(i).sum() - n(i)) / n_max);
  if (opt.strict && sol.row_sum_error > 1e-9)
    throw SingularSystemError(
        "solve_vx: kernel rows do not sum to the density (orbitals not "
        "orthonormal); the constant null space is no longer one-dimensional");

  const Vec vh = hartree_potential(n, w, dx, opt.parallel);
  const double floor = opt.density_floor * n_max;
  int peak = 0;
  n.maxCoeff(&peak);

  // Rows normalized by n_i, bordered by a constant column and the gauge row.
  Mat a = Mat::Zero(np + 1, np + 1);
  Vec rhs = Vec::Zero(np + 1);
  for (int i = 0; i < np; ++i) {
    if (n(i) >= floor) {
      const double inv = 1.0 / n(i);
      a.row(i).head(np) = -(dx * inv) * ker.K.row(i);
      a(i, i) += 1.0;
      a(i, np) = 1.0;
      rhs(i) = (-ker.wk(i) + ker.triple(i)) * inv;
    } else {
      const int nb = i < peak ? i + 1 : i - 1;
      a(i, i) = 1.0;
      a(i, nb) = -1.0;
      rhs(i) = -(vh(i) - vh(nb)) / n_electrons;
      ++sol.floored_rows;
    }
  }
  const auto edge = boundary_points(np, opt.gauge.boundary_fraction);
  const double weight = 1.0 / static_cast<double>(edge.size());
  double target = 0.0;
  for (int i : edge) {
    a(np, i) = weight;
    if (opt.gauge.kind == GaugeRule::Kind::asymptotic)
      target -= weight * vh(i) / n_electrons;
  }
  rhs(np) = target;

  const Eigen::PartialPivLU<Mat> lu(a);
  const Vec full = lu.solve(rhs);
  sol.v_x = full.head(np);

  const Vec r = a.topLeftCorner(np, np) * sol.v_x - rhs.head(np);
  const double scale = rhs.head(np).norm();
  sol.residual = scale > 0.0 ? r.norm() / scale : r.norm();
  if (opt.strict && !(sol.residual <= 1e-10))
    throw SingularSystemError("solve_vx: residual " + std::to_string(sol.residual) +
                              " exceeds 1e-10");
  return sol;
}

Vec StaticPotential::sample(const Grid1D &g) const {
  Vec v(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.x(i) - center;
    switch (shape) {
    case Shape::soft_well:
      v(i) = -depth / std::sqrt(x * x + softening * softening);
      break;
    case Shape::harmonic:
      v(i) = 0.5 * omega * omega * x * x;
      break;
    case Shape::double_well: {
      const double h = 0.5 * separation;
      v(i) = -depth / std::sqrt((x - h) * (x - h) + softening * softening) -
             depth / std::sqrt((x + h) * (x + h) + softening * softening);
      break;
    }
    }
  }
  return v;
}

double Drive::amplitude(double t) const {
  if (t < 0.0)
    return 0.0;
  double f = 0.0;
  switch (envelope) {
  case Envelope::none:
  case Envelope::kick:
    return 0.0;
  case Envelope::constant:
    f = 1.0;
    break;
  case Envelope::sin2:
    if (t < duration) {
      const double s = std::sin(std::numbers::pi * t / duration);
      f = s * s;
    }
    break;
  case Envelope::gaussian: {
    const double z = (t - t0) / width;
    f = std::exp(-0.5 * z * z);
    break;
  }
  }
  return E0 * f * std::cos(omega * t);
}

Eigenpairs lowest_eigenpairs(const Grid1D &g, const Vec &v, int count) {
  if (count < 1 || count > g.n_points)
    throw DomainError("lowest_eigenpairs: bad orbital count");
  const Kinetic t(g);
  Vec diag = v.array() + t.diag;
  Vec off = Vec::Constant(g.n_points - 1, t.off);
  Eigen::SelfAdjointEigenSolver<Mat> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("lowest_eigenpairs: tridiagonal solver failed", 0.0);
  Eigenpairs out;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count) / std::sqrt(g.dx);
  for (int a = 0; a < count; ++a) {
    // deterministic sign: largest component positive
    Eigen::Index k = 0;
    out.vectors.col(a).cwiseAbs().maxCoeff(&k);
    if (out.vectors(k, a) < 0.0)
      out.vectors.col(a) *= -1.0;
  }
  return out;
}

std::vector<int> closed_shell_occupations(int n_electrons) {
  if (n_electrons == 1)
    return {1};
  if (n_electrons < 1 || n_electrons % 2 != 0)
    throw DomainError("closed_shell_occupations: N must be 1 or even");
  return std::vector<int>(static_cast<std::size_t>(n_electrons / 2), 2);
}

Energies hf_energies(const Grid1D &g, const OrbitalSet &orbs, const Vec &v0,
                     const Mat &w) {
  const double dx = g.dx;
  const auto dm = DensityMatrix::from(orbs);
  const Vec n = dm.density();
  const Kinetic t(g);
  Energies e;
  for (Eigen::Index a = 0; a < orbs.psi.cols(); ++a) {
    const auto psi = orbs.psi.col(a);
    cd s{};
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      cd hp = t.diag * psi(i);
      if (i > 0)
        hp += t.off * psi(i - 1);
      if (i + 1 < psi.size())
        hp += t.off * psi(i + 1);
      s += std::conj(psi(i)) * hp;
    }
    e.kinetic += orbs.occupations[static_cast<std::size_t>(a)] * dx * s.real();
  }
  e.external = dx * v0.dot(n);
  const Vec vh = hartree_potential(n, w, dx);
  e.hartree = 0.5 * dx * vh.dot(n);
  // -1/2 sum_sigma int int w |rho_sigma|^2
  const ExchangeKernel ker = assemble_kernel_parallel(dm, w, dx);
  e.exchange = -0.5 * dx * ker.wk.sum();
  e.total = e.kinetic + e.external + e.hartree + e.exchange;
  return e;
}

GroundState scf_ground_state(const Grid1D &g, const Interaction &inter,
                             const Vec &v0, int n_electrons,
                             const GroundStateOptions &opt) {
  if (!(opt.mix > 0.0 && opt.mix <= 1.0))
    throw DomainError("scf_ground_state: mix must lie in (0, 1]");
  if (v0.size() != g.n_points)
    throw DomainError("scf_ground_state: v0 does not match the grid");
  const auto occ = closed_shell_occupations(n_electrons);
  const int n_orb = static_cast<int>(occ.size());
  const Mat w = inter.matrix(g);

  GroundState gs;
  Vec v_hxc = Vec::Zero(g.n_points);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const Eigenpairs ep = lowest_eigenpairs(g, v0 + v_hxc, n_orb);
    OrbitalSet orbs;
    orbs.psi = ep.vectors.cast<cd>();
    orbs.occupations = occ;
    const auto dm = DensityMatrix::from(orbs);
    const Vec n = dm.density();
    const Vec vh = hartree_potential(n, w, g.dx, opt.solve.parallel);
    const ExchangeSolution xs = solve_vx(dm, n, w, g, opt.solve);
    const Vec v_out = vh + xs.v_x;
    const double change = (v_out - v_hxc).cwiseAbs().maxCoeff();
    gs.residual_history.push_back(change);
    if (change < opt.tol) {
      gs.orbitals = std::move(orbs);
      gs.v_x = xs.v_x;
      gs.v_h = vh;
      gs.density = n;
      gs.iterations = it;
      gs.energies = hf_energies(g, gs.orbitals, v0, w);
      gs.energies.eigenvalues.assign(ep.values.data(), ep.values.data() + n_orb);
      return gs;
    }
    v_hxc += opt.mix * (v_out - v_hxc);
  }
  throw ConvergenceError("scf_ground_state: no convergence after " +
                             std::to_string(opt.max_iterations) +
                             " iterations, last change " +
                             std::to_string(gs.residual_history.back()),
                         gs.residual_history.back());
}

double dipole(const Grid1D &g, const Vec &n) {
  double s = 0.0;
  for (int i = 0; i < g.n_points; ++i)
    s += g.x(i) * n(i);
  return g.dx * s;
}

namespace {

// One Crank-Nicolson step for every orbital with a real potential v:
// (1 + i dt/2 H) psi' = (1 - i dt/2 H) psi, H tridiagonal. The density
// weighted mean vbar of v is taken out of H and applied as the exact phase
// exp(-i vbar dt), so a constant added to v changes only a global phase.
void crank_nicolson(const Grid1D &g, const Vec &v, double dt, CMat &psi) {
  const Eigen::Index n = psi.rows();
  const Kinetic t(g);
  const Vec weight = psi.rowwise().squaredNorm();
  const double vbar = weight.sum() > 0.0 ? weight.dot(v) / weight.sum() : v.mean();
  const cd half(0.0, 0.5 * dt);
  const cd off = half * t.off;
  std::vector<cd> diag(static_cast<std::size_t>(n)), cp(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    diag[static_cast<std::size_t>(i)] = half * (t.diag + (v(i) - vbar));
  // Thomas elimination of (1 + diag, off) shared by all columns.
  std::vector<cd> denom(static_cast<std::size_t>(n));
  denom[0] = 1.0 + diag[0];
  cp[0] = off / denom[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    denom[k] = 1.0 + diag[k] - off * cp[k - 1];
    if (std::abs(denom[k]) < 1e-300)
      throw ConvergenceError("crank_nicolson: zero pivot", 0.0);
    cp[k] = off / denom[k];
  }
  const cd phase = std::exp(cd(0.0, -vbar * dt));
  std::vector<cd> d(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < psi.cols(); ++a) {
    auto col = psi.col(a);
    for (Eigen::Index i = 0; i < n; ++i) {
      cd r = (1.0 - diag[static_cast<std::size_t>(i)]) * col(i);
      if (i > 0)
        r -= off * col(i - 1);
      if (i + 1 < n)
        r -= off * col(i + 1);
      d[static_cast<std::size_t>(i)] = r;
    }
    d[0] /= denom[0];
    for (Eigen::Index i = 1; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      d[k] = (d[k] - off * d[k - 1]) / denom[k];
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) {
      const auto k = static_cast<std::size_t>(i);
      d[k] -= cp[k] * d[k + 1];
    }
    for (Eigen::Index i = 0; i < n; ++i)
      col(i) = phase * d[static_cast<std::size_t>(i)];
  }
}

// psi <- psi - i dt H psi.
void euler_step(const Grid1D &g, const Vec &v, double dt, CMat &psi) {
  const Kinetic t(g);
  const Eigen::Index n = psi.rows();
  CMat out(psi.rows(), psi.cols());
  for (Eigen::Index a = 0; a < psi.cols(); ++a)
    for (Eigen::Index i = 0; i < n; ++i) {
      cd hp = (t.diag + v(i)) * psi(i, a);
      if (i > 0)
        hp += t.off * psi(i - 1, a);
      if (i + 1 < n)
        hp += t.off * psi(i + 1, a);
      out(i, a) = psi(i, a) - cd(0.0, dt) * hp;
    }
  psi = std::move(out);
}

// Symmetric (Loewdin) orthonormalization under the grid inner product.
void lowdin(const Grid1D &g, CMat &psi) {
  const CMat s = g.dx * (psi.adjoint() * psi);
  Eigen::SelfAdjointEigenSolver<CMat> es(s);
  const Vec inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  psi = psi * (es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint());
}

Vec orbital_norms(const Grid1D &g, const CMat &psi) {
  return g.dx * psi.colwise().squaredNorm().transpose();
}

} // namespace

Trajectory propagate(const Grid1D &g, const Interaction &inter, const Vec &v0,
                     const Drive &drive, OrbitalSet state,
                     const PropagationOptions &opt, ExchangeModel model) {
  if (!(opt.dt > 0.0) || opt.n_steps < 0 || opt.record_stride < 1)
    throw DomainError("propagate: need dt > 0, n_steps >= 0, record_stride >= 1");
  if (state.psi.rows() != g.n_points || v0.size() != g.n_points)
    throw DomainError("propagate: fields do not match the grid");
  if (model == ExchangeModel::tdhf_single_orbital &&
      (state.occupations.size() != 1 || state.occupations[0] != 2))
    throw DomainError("propagate: single-orbital TDHF needs one doubly occupied orbital");
  const Mat w = inter.matrix(g);
  const Vec x = g.coordinates();
  const bool masked = opt.mask_strength > 0.0 && opt.mask_fraction > 0.0;
  SolveOptions solve = opt.solve;
  if (masked)
    solve.strict = false;

  Vec mask = Vec::Ones(g.n_points);
  if (masked) {
    const double layer = opt.mask_fraction * (g.x_max - g.x_min);
    for (int i = 0; i < g.n_points; ++i) {
      const double depth = std::max(g.x_min + layer - x(i), x(i) - (g.x_max - layer));
      if (depth > 0.0) {
        const double s = depth / layer;
        mask(i) = 1.0 - opt.mask_strength * s * s * s * s;
      }
    }
  }

  if (drive.envelope == Drive::Envelope::kick) {
    for (int i = 0; i < g.n_points; ++i)
      state.psi.row(i) *= std::exp(cd(0.0, drive.E0 * x(i)));
  }

  struct Hxc {
    Vec n, vh, vx;
  };
  auto hxc = [&](const CMat &psi) {
    OrbitalSet tmp;
    tmp.psi = psi;
    tmp.occupations = state.occupations;
    const auto dm = DensityMatrix::from(tmp);
    Hxc h;
    h.n = dm.density();
    h.vh = hartree_potential(h.n, w, g.dx, solve.parallel);
    if (model == ExchangeModel::lhf)
      h.vx = solve_vx(dm, h.n, w, g, solve).v_x;
    else
      h.vx = -0.5 * h.vh;
    h.vx.array() += opt.vx_shift;
    return h;
  };

  Trajectory tr;
  auto record = [&](int step, const Hxc &h, double t) {
    if (step % opt.record_stride == 0) {
      TrajectoryPoint p;
      p.t = t;
      p.dipole = dipole(g, h.n);
      p.norm = g.dx * h.n.sum();
      OrbitalSet tmp;
      tmp.psi = state.psi;
      tmp.occupations = state.occupations;
      p.energy = hf_energies(g, tmp, v0 + drive.amplitude(t) * x, w).total;
      tr.points.push_back(p);
    }
    if (opt.snapshot_stride > 0 && step % opt.snapshot_stride == 0)
      tr.snapshots.push_back({t, h.n, h.vx});
  };

  const double norm_tol =
      opt.scheme == PropagationOptions::Scheme::cn ? opt.norm_tol_cn : opt.norm_tol_euler;
  Hxc now = hxc(state.psi);
  double t = state.time;
  record(0, now, t);
  for (int step = 1; step <= opt.n_steps; ++step) {
    const Vec before = orbital_norms(g, state.psi);
    CMat next = state.psi;
    if (opt.scheme == PropagationOptions::Scheme::cn) {
      const Vec ext = v0 + drive.amplitude(t + 0.5 * opt.dt) * x;
      crank_nicolson(g, ext + now.vh + now.vx, opt.dt, next);
      const Hxc pred = hxc(next);
      next = state.psi;
      crank_nicolson(g, ext + 0.5 * (now.vh + now.vx + pred.vh + pred.vx), opt.dt,
                     next);
    } else {
      euler_step(g, v0 + drive.amplitude(t) * x + now.vh + now.vx, opt.dt, next);
    }
    const Vec after = orbital_norms(g, next);
    const double drift = (after - before).cwiseAbs().maxCoeff();
    tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
    if (!(drift <= norm_tol))
      throw ConvergenceError("propagate: per-step norm drift " + std::to_string(drift) +
                                 " at t = " + std::to_string(t + opt.dt) +
                                 " exceeds " + std::to_string(norm_tol),
                             drift);
    if (opt.scheme == PropagationOptions::Scheme::euler)
      lowdin(g, next);
    if (masked)
      next = mask.asDiagonal() * next;
    state.psi = std::move(next);
    t = state.time + step * opt.dt;
    now = hxc(state.psi);
    record(step, now, t);
  }
  state.time = t;
  tr.final_state = std::move(state);
  return tr;
}

Spectrum absorption_spectrum(const std::vector<TrajectoryPoint> &trace,
                             double damping, double omega_max, int n_omega) {
  if (trace.size() < 2 || n_omega < 2 || !(omega_max > 0.0) || !(damping >= 0.0))
    throw DomainError("absorption_spectrum: need >= 2 samples and frequencies");
  const double dt = trace[1].t - trace[0].t;
  for (std::size_t k = 2; k < trace.size(); ++k)
    if (std::abs((trace[k].t - trace[k - 1].t) - dt) > 1e-9 * std::abs(dt))
      throw DomainError("absorption_spectrum: samples must be uniform in time");
  Spectrum s;
  const double d0 = trace.front().dipole, t0 = trace.front().t;
  for (int k = 0; k < n_omega; ++k) {
    const double om = omega_max * k / (n_omega - 1);
    cd acc{};
    for (const auto &p : trace) {
      const double tau = p.t - t0;
      acc += (p.dipole - d0) * std::exp(cd(-damping * tau, om * tau));
    }
    s.omega.push_back(om);
    s.strength.push_back(dt * acc.imag());
  }
  return s;
}

void write_snapshots(const std::string &path, const Grid1D &g,
                     const std::vector<Snapshot> &snaps, bool with_density,
                     bool with_vx) {
  if (!with_density && !with_vx)
    throw DomainError("write_snapshots: no field selected");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("write_snapshots: cannot open " + path);
  const char magic[8] = {'T', 'D', 'L', 'H', 'F', 'S', 'N', '1'};
  out.write(magic, 8);
  std::vector<std::int32_t> ids;
  if (with_density)
    ids.push_back(1);
  if (with_vx)
    ids.push_back(2);
  const std::int32_t np = g.n_points, nf = static_cast<std::int32_t>(ids.size());
  out.write(reinterpret_cast<const char *>(&np), sizeof np);
  out.write(reinterpret_cast<const char *>(&nf), sizeof nf);
  for (std::int32_t id : ids)
    out.write(reinterpret_cast<const char *>(&id), sizeof id);
  for (double v : {g.x_min, g.x_max, g.dx})
    out.write(reinterpret_cast<const char *>(&v), sizeof v);
  const double zero = 0.0;
  for (const auto &s : snaps) {
    out.write(reinterpret_cast<const char *>(&s.t), sizeof s.t);
    for (std::int32_t id : ids) {
      const Vec &f = id == 1 ? s.density : s.v_x;
      for (int i = 0; i < np; ++i) {
        const double v = f(i);
        out.write(reinterpret_cast<const char *>(&v), sizeof v);
        out.write(reinterpret_cast<const char *>(&zero), sizeof zero);
      }
    }
  }
  if (!out)
    throw IoError("write_snapshots: write failed for " + path);
}

} // namespace tdlhf::grid
