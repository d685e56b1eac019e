#pragma once

// Slow reference evaluators. Each one integrates the defining expression
// directly on a deterministic mesh, without the closed forms or the
// reductions used by the production code, so the two can be compared.

#include <complex>

#include "tdlhf/heg_model.hpp"
#include "tdlhf/tdlhf_grid.hpp"

namespace tdlhf::oracle {

using cd = std::complex<double>;

struct OracleSpec {
  int radial_nodes = 800;
  int angular_nodes = 800;
  double cutoff_over_kF = 3.0; // half-width of the k-sum box
  int ksum_nodes_per_kF = 150;  // k-sum mesh density
  double eta_over_epsF = 0.05; // broadening used by chi_s_ksum

  // Throws DomainError unless counts >= 8 and cutoff >= 3.
  void validate() const;
};

// 2/(2pi)^3 \int f(k) f(k + q) d^3k on a midpoint (k, cos) mesh.
double a_oracle(const heg::HegParams &p, double q, const OracleSpec &spec);

// 2/(2pi)^3 \int f(k1) / |k - k1|^2 d^3k1. Spherical coordinates centred on
// k remove the 1/r^2 factor; for every ray the radial integral of the
// occupation is its length inside the Fermi sphere.
double c_oracle(const heg::HegParams &p, double k, const OracleSpec &spec);

// 2/(2pi)^3 \int f(k1) f(k1 + q) / |k - k1|^2 d^3k1, same ray construction;
// y is the cosine between k and q.
double b_oracle(const heg::HegParams &p, double q, double k, double y,
                const OracleSpec &spec);

// Lindhard function as the literal sum 2/V sum_k over a Cartesian k mesh of
// spacing k_F / ksum_nodes_per_kF (V = (2pi / dk)^3), midpoint-offset.
cd chi_s_ksum(const heg::HegParams &p, double q, double omega, double eta,
              const OracleSpec &spec);

// delta v_x / delta v_s from a dense (k, y) sum of the full integrand, with
// B evaluated pointwise; no decomposition, no pole subtraction. Midpoint in
// k; in y the numerator is interpolated linearly across each cell and the
// two energy denominators are integrated exactly, so the sum stays accurate
// when eta is below k q dy.
cd ratio_riemann(const heg::HegParams &p, double q, double omega, double eta,
                 const OracleSpec &spec);

// Two electrons in one doubly occupied orbital: restricted Hartree-Fock by
// direct iteration of the Fock operator -1/2 d^2/dx^2 + v0 + v_H / 2.
struct HfResult {
  grid::OrbitalSet orbitals;
  double energy = 0.0;
  double eigenvalue = 0.0;
  int iterations = 0;
};
HfResult hf_n2_ground_state(const grid::Grid1D &g, const grid::Interaction &w,
                            const grid::Vec &v0, double tol = 1e-12,
                            int max_iterations = 5000);

// Single-orbital TDHF: the same Crank-Nicolson stepper with exchange
// -v_H / 2 taken directly instead of from the exchange equation.
grid::Trajectory tdhf_n2(const grid::Grid1D &g, const grid::Interaction &w,
                         const grid::Vec &v0, const grid::Drive &drive,
                         const grid::OrbitalSet &initial,
                         const grid::PropagationOptions &opt);

} // namespace tdlhf::oracle
