#pragma once

#include <numbers>
#include <utility>

namespace tdlhf::heg {

// Homogeneous electron gas at zero temperature, spin-unpolarized, Hartree
// atomic units. Immutable once built.
struct HegParams {
  double r_s = 0.0;
  double k_F = 0.0;
  double n0 = 0.0;
  double omega_pl = 0.0;
  double eps_F = 0.0;

  static HegParams from_rs(double r_s);
};

inline HegParams from_rs(double r_s) { return HegParams::from_rs(r_s); }

// Occupation of the plane wave |k| at T = 0. The Fermi surface itself
// (k == k_F) counts as occupied.
int occupation(const HegParams &p, double k);

// (omega_minus, omega_plus): edges of the particle-hole continuum at q.
std::pair<double, double> ph_continuum_bounds(const HegParams &p, double q);

} // namespace tdlhf::heg
