#include "tdlhf/heg_model.hpp"

#include <algorithm>
#include <cmath>

#include "tdlhf/errors.hpp"

namespace tdlhf::heg {

using std::numbers::pi;

HegParams HegParams::from_rs(double r_s) {
  if (!std::isfinite(r_s) || !(r_s > 0.0))
    throw DomainError("from_rs: r_s must be positive and finite");
  HegParams p;
  p.r_s = r_s;
  p.k_F = std::cbrt(9.0 * pi / 4.0) / r_s;
  p.n0 = 3.0 / (4.0 * pi * r_s * r_s * r_s);
  p.omega_pl = std::sqrt(4.0 * pi * p.n0);
  p.eps_F = 0.5 * p.k_F * p.k_F;
  return p;
}

int occupation(const HegParams &p, double k) {
  if (!(k >= 0.0))
    throw DomainError("occupation: k must be non-negative");
  return k <= p.k_F ? 1 : 0;
}

std::pair<double, double> ph_continuum_bounds(const HegParams &p, double q) {
  if (!(q > 0.0))
    throw DomainError("ph_continuum_bounds: q must be positive");
  const double half = 0.5 * q * q;
  return {std::max(0.0, half - q * p.k_F), half + q * p.k_F};
}

} // namespace tdlhf::heg
