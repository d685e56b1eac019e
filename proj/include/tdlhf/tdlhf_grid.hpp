#pragma once

// Time-dependent localized Hartree-Fock on a uniform 1D grid with a softened
// Coulomb interaction: ground state by self-consistency, then real-time
// propagation with the local exchange potential re-solved every (half) step.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tdlhf::grid {

using cd = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

struct Grid1D {
  double x_min = 0.0, x_max = 0.0;
  int n_points = 0;
  double dx = 0.0;

  // Throws DomainError unless n_points >= 16 and x_max > x_min.
  static Grid1D make(double x_min, double x_max, int n_points);
  double x(int i) const { return x_min + dx * i; }
  Vec coordinates() const;
};

// w(x, x') = strength / sqrt((x - x')^2 + a^2). strength = 0 switches the
// electron-electron interaction off.
struct Interaction {
  double softening = 1.0;
  double strength = 1.0;

  double operator()(double x, double xp) const;
  Mat matrix(const Grid1D &g) const;
};

// Orbitals are the columns of `psi`, normalized as dx * sum |psi|^2 = 1.
// Occupation 2 puts an orbital in both spin channels, occupation 1 in the
// up channel only.
struct OrbitalSet {
  CMat psi;
  std::vector<int> occupations;
  double time = 0.0;

  int electron_count() const;
  // max |dx * <psi_a|psi_b> - delta_ab|
  double orthonormality_error(const Grid1D &g) const;
};

// rho_sigma(x, x') = sum over orbitals in channel sigma of psi(x) psi*(x').
// Kept in factored form; the full matrices are built on request.
struct DensityMatrix {
  CMat up, down; // orbital columns per spin channel

  static DensityMatrix from(const OrbitalSet &orbs);
  CMat rho_up() const;
  CMat rho_down() const;
  CMat rho() const; // rho_up + rho_down
  Vec density() const;
};

Vec density(const OrbitalSet &orbs);

struct GaugeRule {
  enum class Kind {
    // mean of v_x + v_H / N over the outer boundary points vanishes; a
    // single electron then has v_x = -v_H exactly.
    asymptotic,
    // mean of v_x over the outer boundary points vanishes.
    boundary_zero,
  };
  Kind kind = Kind::asymptotic;
  double boundary_fraction = 0.05; // per side
};

// Pieces of the discretized exchange equation
//   n_i v_i - dx sum_j K_ij v_j = -dx sum_j w_ij K_ij + dx^2 T_i,
// K_ij = sum_sigma |rho_sigma(x_i, x_j)|^2,
// T_i  = sum_sigma sum_jk rho_sigma(i,j) w_jk rho_sigma(j,k) rho_sigma(k,i).
struct ExchangeKernel {
  Mat K;
  Vec wk; // dx sum_j w_ij K_ij
  Vec triple;
};

// Serial reference: the triple sum over full density matrices, O(n^3) per
// channel. Parallel: OpenMP over rows with the factored n x n_orb route; its
// result does not depend on the thread count. The two agree to roundoff. The
// Hartree pair shares its per-row arithmetic and agrees bit for bit.
ExchangeKernel assemble_kernel_serial(const DensityMatrix &dm, const Mat &w,
                                      double dx);
ExchangeKernel assemble_kernel_parallel(const DensityMatrix &dm, const Mat &w,
                                        double dx);
Vec hartree_serial(const Vec &n, const Mat &w, double dx);
Vec hartree_parallel(const Vec &n, const Mat &w, double dx);

Vec hartree_potential(const Vec &n, const Mat &w, double dx,
                      bool parallel = true);

struct ExchangeSolution {
  Vec v_x;
  double residual = 0.0; // ||A v - r|| / ||r||
  int floored_rows = 0;
  double row_sum_error = 0.0; // max |dx sum_j K_ij - n_i| / max n
};

struct SolveOptions {
  GaugeRule gauge;
  double density_floor = 1e-12; // relative to max n
  bool parallel = true;
  // Enforce the row-sum identity and the residual bound. Off only for
  // absorbing-boundary runs, where the orbitals lose norm by design.
  bool strict = true;
};

// Solves the exchange equation for the density matrix of `dm`. Rows where
// n < density_floor * max n are replaced by v_i - v_nb = -(vH_i - vH_nb) / N,
// nb the neighbour towards the interior. Throws SingularSystemError when the
// kernel row-sum identity fails (orbitals not orthonormal) or the solve
// residual exceeds 1e-10.
ExchangeSolution solve_vx(const DensityMatrix &dm, const Vec &n, const Mat &w,
                          const Grid1D &g, const SolveOptions &opt = {});

// External potential shapes.
struct StaticPotential {
  enum class Shape { soft_well, harmonic, double_well };
  Shape shape = Shape::soft_well;
  double depth = 2.0;      // soft_well / double_well charge Z
  double softening = 1.0;  // soft_well / double_well
  double center = 0.0;
  double separation = 2.0; // double_well: minima at center +- separation / 2
  double omega = 0.25;     // harmonic

  Vec sample(const Grid1D &g) const;
};

// Dipole drive v(x, t) = E0 x f(t) cos(omega t) for t >= 0, or an impulsive
// kick psi -> exp(i E0 x) psi at t = 0.
struct Drive {
  enum class Envelope { none, kick, constant, sin2, gaussian };
  Envelope envelope = Envelope::none;
  double E0 = 0.0;
  double omega = 0.0;
  double duration = 0.0; // sin2: full width of the pulse
  double t0 = 0.0;       // gaussian centre
  double width = 1.0;    // gaussian rms width

  double amplitude(double t) const; // E0 f(t) cos(omega t); 0 for t < 0
};

struct GroundStateOptions {
  double mix = 0.3;
  double tol = 1e-10; // max potential change between iterations
  int max_iterations = 2000;
  SolveOptions solve;
};

struct Energies {
  double kinetic = 0.0, external = 0.0, hartree = 0.0, exchange = 0.0;
  double total = 0.0;
  std::vector<double> eigenvalues;
};

struct GroundState {
  OrbitalSet orbitals;
  Vec v_x, v_h, density;
  Energies energies;
  int iterations = 0;
  std::vector<double> residual_history;
};

// Kinetic operator -1/2 d^2/dx^2, three-point stencil, zero Dirichlet walls.
struct Kinetic {
  double diag = 0.0, off = 0.0;
  explicit Kinetic(const Grid1D &g)
      : diag(1.0 / (g.dx * g.dx)), off(-0.5 / (g.dx * g.dx)) {}
};

// Lowest orbitals of -1/2 d^2/dx^2 + v, normalized on the grid.
struct Eigenpairs {
  Vec values;
  Mat vectors;
};
Eigenpairs lowest_eigenpairs(const Grid1D &g, const Vec &v, int count);

// Occupations for N electrons: N = 1 gives one singly occupied orbital, even
// N gives N/2 doubly occupied ones. Other N throw DomainError.
std::vector<int> closed_shell_occupations(int n_electrons);

GroundState scf_ground_state(const Grid1D &g, const Interaction &w,
                             const Vec &v0, int n_electrons,
                             const GroundStateOptions &opt = {});

// Hartree-Fock energy expression for the orbitals.
Energies hf_energies(const Grid1D &g, const OrbitalSet &orbs, const Vec &v0,
                     const Mat &w);

struct PropagationOptions {
  enum class Scheme { cn, euler };
  Scheme scheme = Scheme::cn;
  double dt = 0.01;
  int n_steps = 1000;
  // per-step |norm change| above this aborts; euler is not unitary
  double norm_tol_cn = 1e-10;
  double norm_tol_euler = 1e-3;
  double vx_shift = 0.0; // constant added to every v_x solve
  // absorbing mask 1 - strength * s^4 on the outer `mask_fraction` of each
  // side (s in [0, 1] across the layer); strength 0 disables it.
  double mask_fraction = 0.0;
  double mask_strength = 0.0;
  int record_stride = 1;
  int snapshot_stride = 0; // 0: no snapshots
  SolveOptions solve;
};

struct TrajectoryPoint {
  double t = 0.0;
  double dipole = 0.0;
  double norm = 0.0;   // integral of n
  double energy = 0.0; // HF energy expression with the instantaneous field
};

struct Snapshot {
  double t = 0.0;
  Vec density;
  Vec v_x;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<Snapshot> snapshots;
  double max_norm_drift = 0.0; // largest per-step change of any orbital norm
  OrbitalSet final_state;
};

// Effective-potential model for the stepper: LHF solves the exchange
// equation; the single-orbital TDHF model uses v_x = -v_H / 2 directly.
enum class ExchangeModel { lhf, tdhf_single_orbital };

Trajectory propagate(const Grid1D &g, const Interaction &w, const Vec &v0,
                     const Drive &drive, OrbitalSet state,
                     const PropagationOptions &opt,
                     ExchangeModel model = ExchangeModel::lhf);

double dipole(const Grid1D &g, const Vec &n);

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> strength; // Im of the damped transform of d(t) - d(0)
};

// S(w) = Im sum_t [d(t) - d(0)] exp(i w t - gamma t) dt on a uniform
// frequency grid.
Spectrum absorption_spectrum(const std::vector<TrajectoryPoint> &trace,
                             double damping, double omega_max, int n_omega);

// Binary snapshot file, little-endian: 8-byte magic "TDLHFSN1", int32
// n_points, int32 n_fields, n_fields int32 field ids (1 density, 2 v_x),
// float64 x_min, x_max, dx; then per record float64 t followed by n_fields
// blocks of n_points (re, im) float64 pairs. The fields are real, so every
// imaginary slot holds 0.
void write_snapshots(const std::string &path, const Grid1D &g,
                     const std::vector<Snapshot> &snaps, bool with_density = true,
                     bool with_vx = true);

} // namespace tdlhf::grid
