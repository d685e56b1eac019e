#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "tdlhf/errors.hpp"
#include "tdlhf/oracle.hpp"
#include "tdlhf/tdlhf_grid.hpp"

using namespace tdlhf;
using namespace tdlhf::grid;
using doctest::Approx;

namespace {

const Grid1D &small_grid() {
  static const Grid1D g = Grid1D::make(-15.0, 15.0, 200);
  return g;
}

Vec well(const Grid1D &g, double depth) {
  StaticPotential v;
  v.depth = depth;
  return v.sample(g);
}

double max_abs_diff(const Mat &a, const Mat &b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("grid and occupations") {
  CHECK_THROWS_AS(Grid1D::make(0.0, 1.0, 8), DomainError);
  CHECK_THROWS_AS(Grid1D::make(1.0, 1.0, 100), DomainError);
  const auto g = Grid1D::make(-1.0, 1.0, 21);
  CHECK(g.dx == Approx(0.1));
  CHECK(g.x(20) == Approx(1.0));
  CHECK((closed_shell_occupations(1) == std::vector<int>{1}));
  CHECK((closed_shell_occupations(4) == std::vector<int>{2, 2}));
  CHECK_THROWS_AS(closed_shell_occupations(3), DomainError);
  CHECK_THROWS_AS((Interaction{0.0, 1.0}.matrix(g)), DomainError);
}

TEST_CASE("harmonic eigenvalues") {
  const auto g = Grid1D::make(-20.0, 20.0, 800);
  StaticPotential h;
  h.shape = StaticPotential::Shape::harmonic;
  h.omega = 0.25;
  const auto ep = lowest_eigenpairs(g, h.sample(g), 3);
  for (int k = 0; k < 3; ++k)
    CHECK(ep.values(k) == Approx(h.omega * (k + 0.5)).epsilon(1e-3));
}

TEST_CASE("serial and parallel kernels agree") {
  const auto &g = small_grid();
  const Interaction w;
  const Mat wm = w.matrix(g);
  const auto ep = lowest_eigenpairs(g, well(g, 3.0), 2);
  OrbitalSet orbs;
  orbs.psi = ep.vectors.cast<cd>();
  orbs.psi.col(1) *= cd(std::cos(0.3), std::sin(0.3));
  orbs.occupations = {2, 1};
  const auto dm = DensityMatrix::from(orbs);
  const auto s = assemble_kernel_serial(dm, wm, g.dx);
  const auto p = assemble_kernel_parallel(dm, wm, g.dx);
  CHECK(max_abs_diff(s.K, p.K) <= 1e-13 * s.K.cwiseAbs().maxCoeff());
  CHECK(max_abs_diff(s.wk, p.wk) <= 1e-13 * s.wk.cwiseAbs().maxCoeff());
  CHECK(max_abs_diff(s.triple, p.triple) <= 1e-12 * s.triple.cwiseAbs().maxCoeff());
  const Vec n = dm.density();
  CHECK(max_abs_diff(hartree_serial(n, wm, g.dx), hartree_parallel(n, wm, g.dx)) == 0.0);

  // row sums: dx sum_j K_ij = n_i for orthonormal orbitals
  const Vec rows = g.dx * s.K.rowwise().sum();
  CHECK((rows - n).cwiseAbs().maxCoeff() < 1e-12 * n.maxCoeff());
  CHECK(n.sum() * g.dx == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("exchange equation rejects non-orthonormal orbitals") {
  const auto &g = small_grid();
  const Mat wm = Interaction{}.matrix(g);
  const auto ep = lowest_eigenpairs(g, well(g, 2.0), 1);
  OrbitalSet orbs;
  orbs.psi = ep.vectors.cast<cd>() * 1.2;
  orbs.occupations = {2};
  const auto dm = DensityMatrix::from(orbs);
  CHECK_THROWS_AS(solve_vx(dm, dm.density(), wm, g), SingularSystemError);
}

TEST_CASE("one electron: exchange cancels Hartree") {
  const auto &g = small_grid();
  const auto gs = scf_ground_state(g, Interaction{}, well(g, 1.0), 1);
  CHECK((gs.v_x + gs.v_h).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(gs.density.sum() * g.dx == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two electrons: v_x = -v_H / 2 up to a constant, HF energy") {
  const auto &g = small_grid();
  const Interaction w;
  const Vec v0 = well(g, 2.0);
  const auto gs = scf_ground_state(g, w, v0, 2);
  const int edge = g.n_points / 20;
  const Vec s = (gs.v_x + 0.5 * gs.v_h).segment(edge, g.n_points - 2 * edge);
  CHECK(s.maxCoeff() - s.minCoeff() <= 1e-6);
  const auto hf = oracle::hf_n2_ground_state(g, w, v0);
  CHECK(gs.energies.total == Approx(hf.energy).epsilon(1e-6));
  CHECK(hf_energies(g, gs.orbitals, v0, w.matrix(g)).total ==
        Approx(gs.energies.total).epsilon(1e-12));
}

TEST_CASE("ground state is stationary under propagation") {
  const auto &g = small_grid();
  const Interaction w;
  const Vec v0 = well(g, 2.0);
  const auto gs = scf_ground_state(g, w, v0, 2);
  PropagationOptions opt;
  opt.dt = 0.02;
  opt.n_steps = 200;
  opt.snapshot_stride = 50;
  const auto tr = propagate(g, w, v0, Drive{}, gs.orbitals, opt);
  const double d0 = tr.points.front().dipole;
  for (const auto &p : tr.points) {
    CHECK(std::abs(p.dipole - d0) < 1e-9);
    CHECK(p.norm == Approx(2.0).epsilon(1e-10));
    CHECK(p.energy == Approx(tr.points.front().energy).epsilon(1e-9));
  }
  CHECK(tr.max_norm_drift < 1e-10);
  REQUIRE(tr.snapshots.size() >= 2);
  CHECK((tr.snapshots.back().density - gs.density).cwiseAbs().maxCoeff() <
        1e-8 * gs.density.maxCoeff());
}

TEST_CASE("kicked harmonic trap follows the Kohn mode") {
  const auto g = Grid1D::make(-20.0, 20.0, 300);
  StaticPotential h;
  h.shape = StaticPotential::Shape::harmonic;
  h.omega = 0.25;
  const Vec v0 = h.sample(g);
  const Interaction w;
  const auto gs = scf_ground_state(g, w, v0, 2);
  Drive kick;
  kick.envelope = Drive::Envelope::kick;
  kick.E0 = 0.01;
  PropagationOptions opt;
  opt.dt = 0.05;
  opt.n_steps = 1000;
  const auto tr = propagate(g, w, v0, kick, gs.orbitals, opt);
  const double amp = 2.0 * kick.E0 / h.omega;
  double dev = 0.0;
  for (const auto &p : tr.points)
    dev = std::max(dev, std::abs(p.dipole - tr.points.front().dipole -
                                 amp * std::sin(h.omega * p.t)));
  CHECK(dev / amp < 1e-2);

  const auto sp = absorption_spectrum(tr.points, 0.01, 1.0, 1001);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < sp.strength.size(); ++i)
    if (std::abs(sp.strength[i]) > std::abs(sp.strength[peak]))
      peak = i;
  CHECK(sp.omega[peak] == Approx(h.omega).epsilon(0.02));
}

TEST_CASE("LHF matches TDHF for two electrons; gauge shift invariance") {
  const auto &g = small_grid();
  const Interaction w;
  const Vec v0 = well(g, 2.0);
  const auto gs = scf_ground_state(g, w, v0, 2);
  const auto hf = oracle::hf_n2_ground_state(g, w, v0);
  Drive kick;
  kick.envelope = Drive::Envelope::kick;
  kick.E0 = 0.01;
  PropagationOptions opt;
  opt.dt = 0.02;
  opt.n_steps = 250;
  const auto lhf = propagate(g, w, v0, kick, gs.orbitals, opt);
  const auto ref = oracle::tdhf_n2(g, w, v0, kick, hf.orbitals, opt);
  PropagationOptions shifted = opt;
  shifted.vx_shift = 0.37;
  const auto moved = propagate(g, w, v0, kick, gs.orbitals, shifted);
  double dmax = 0.0, ddiff = 0.0, dshift = 0.0;
  for (std::size_t i = 0; i < lhf.points.size(); ++i) {
    dmax = std::max(dmax, std::abs(ref.points[i].dipole));
    ddiff = std::max(ddiff, std::abs(lhf.points[i].dipole - ref.points[i].dipole));
    dshift = std::max(dshift, std::abs(lhf.points[i].dipole - moved.points[i].dipole));
  }
  CHECK(ddiff / dmax <= 1e-4);
  CHECK(dshift / dmax <= 1e-10);
}

TEST_CASE("forward Euler converges at first order") {
  const auto &g = small_grid();
  const Interaction w;
  const Vec v0 = well(g, 2.0);
  const auto gs = scf_ground_state(g, w, v0, 2);
  Drive kick;
  kick.envelope = Drive::Envelope::kick;
  kick.E0 = 0.05;
  const double t_end = 1.0;
  auto final_dipole = [&](PropagationOptions::Scheme s, double dt) {
    PropagationOptions opt;
    opt.scheme = s;
    opt.dt = dt;
    opt.n_steps = static_cast<int>(std::lround(t_end / dt));
    return propagate(g, w, v0, kick, gs.orbitals, opt).points.back().dipole;
  };
  const double ref = final_dipole(PropagationOptions::Scheme::cn, 1e-4);
  const double e1 = std::abs(final_dipole(PropagationOptions::Scheme::euler, 2e-3) - ref);
  const double e2 = std::abs(final_dipole(PropagationOptions::Scheme::euler, 1e-3) - ref);
  const double order = std::log2(e1 / e2);
  CHECK(order > 0.8);
  CHECK(order < 1.3);
}

TEST_CASE("snapshot file layout") {
  const auto g = Grid1D::make(-1.0, 1.0, 16);
  std::vector<Snapshot> snaps(2);
  for (int r = 0; r < 2; ++r) {
    snaps[r].t = 0.5 * r;
    snaps[r].density = Vec::Constant(16, 1.0 + r);
    snaps[r].v_x = Vec::Constant(16, -2.0 - r);
  }
  const auto path = (std::filesystem::temp_directory_path() / "tdlhf_snap_test.bin").string();
  write_snapshots(path, g, snaps, false, true);
  std::ifstream in(path, std::ios::binary);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), {});
  REQUIRE(buf.size() == 8 + 4 + 4 + 4 + 24 + 2 * (8 + 16 * 16));
  CHECK(std::string(buf.data(), 8) == "TDLHFSN1");
  std::int32_t n = 0, nf = 0, id = 0;
  std::memcpy(&n, buf.data() + 8, 4);
  std::memcpy(&nf, buf.data() + 12, 4);
  std::memcpy(&id, buf.data() + 16, 4);
  CHECK(n == 16);
  CHECK(nf == 1);
  CHECK(id == 2);
  double t1 = 0.0, re = 0.0, im = 1.0;
  const std::size_t rec1 = 44 + (8 + 16 * 16);
  std::memcpy(&t1, buf.data() + rec1, 8);
  std::memcpy(&re, buf.data() + rec1 + 8, 8);
  std::memcpy(&im, buf.data() + rec1 + 16, 8);
  CHECK(t1 == 0.5);
  CHECK(re == -3.0);
  CHECK(im == 0.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_snapshots(path, g, snaps, false, false), DomainError);
  CHECK_THROWS_AS(write_snapshots("/nonexistent/dir/x.bin", g, snaps), IoError);
}

TEST_CASE("drive envelopes") {
  Drive d;
  d.envelope = Drive::Envelope::constant;
  d.E0 = 0.2;
  d.omega = 1.5;
  CHECK(d.amplitude(-1.0) == 0.0);
  CHECK(d.amplitude(0.7) == Approx(0.2 * std::cos(1.05)));
  d.envelope = Drive::Envelope::kick;
  CHECK(d.amplitude(0.7) == 0.0);
}
