#pragma once

#include <complex>

#include "tdlhf/heg_model.hpp"
#include "tdlhf/quadrature.hpp"

namespace tdlhf::response {

using cd = std::complex<double>;

// Below this wave vector (in units of k_F) the linearized exchange equation
// is dominated by cancellation against n0 - A(q) ~ q; callers should use the
// closed-form limits instead.
inline constexpr double kQMinOverKF = 1e-3;

struct ComplexResponseSample {
  double q = 0.0;
  double omega = 0.0;
  double eta = 0.0;
  cd chi_s;
  cd ratio;
  cd f_x;
  cd epsilon;
};

// Lindhard function at omega + i eta (T = 0, both spins), closed form.
cd chi_s(const heg::HegParams &p, double q, double omega, double eta);

// Boundary value chi_s(q, omega + i0).
cd chi_s_limit(const heg::HegParams &p, double q, double omega);

// delta v_x / delta v_s of the linearized time-dependent exchange equation.
quad::QuadResult<cd> ratio_vx_vs(const heg::HegParams &p, double q,
                                 double omega, double eta,
                                 const quad::QuadSpec &spec);

// f_x = ratio / chi_s. Throws DomainError when |chi_s| is numerically zero.
cd f_x(const heg::HegParams &p, double q, double omega, double eta,
       const quad::QuadSpec &spec);

// f_x(q, omega) in the eta -> 0 limit, by polynomial extrapolation over
// spec.eta_ladder (units of eps_F).
quad::EtaExtrapolation f_x_eta_extrapolated(const heg::HegParams &p, double q,
                                            double omega,
                                            const quad::QuadSpec &spec,
                                            int order = 2);

// Full sample with every stored field consistent.
ComplexResponseSample sample(const heg::HegParams &p, double q, double omega,
                             double eta, const quad::QuadSpec &spec);

struct Dielectric {
  cd value;
  // 1 + chi_s f_x. When it vanishes the dielectric function has a pole and
  // `at_pole` is set; `value` is then not finite.
  cd screening;
  bool at_pole = false;
};

// 1 - (4 pi / q^2) chi / (1 + chi f).
Dielectric epsilon_from(double q, cd chi, cd fx);

Dielectric epsilon(const heg::HegParams &p, double q, double omega, double eta,
                   const quad::QuadSpec &spec);

// Lindhard (f_x = 0) dielectric function.
cd epsilon_lindhard(const heg::HegParams &p, double q, double omega,
                    double eta);

// Static kernel from the real principal-value form of the omega = 0 limit.
quad::QuadResult<double> ratio_static(const heg::HegParams &p, double q,
                                      const quad::QuadSpec &spec);
double f_x_static(const heg::HegParams &p, double q,
                  const quad::QuadSpec &spec);

// Closed-form limits, -3 pi / (4 k_F^2) and -pi / k_F^2.
double fx_limit_q0_finite_omega(const heg::HegParams &p);
double fx_limit_omega0_q0(const heg::HegParams &p);

// Numerical q -> 0 limit of k_F^2 f_x_static, by Richardson extrapolation of
// f_x_static on q = q0, q0/2, q0/4 (q0 in units of k_F).
struct StaticLimit {
  double value = 0.0;    // k_F^2 * lim f_x_static
  double residual = 0.0; // change against the lower-order extrapolant
};
StaticLimit fx_static_q0_numeric(const heg::HegParams &p,
                                 const quad::QuadSpec &spec,
                                 double q0_over_kF = 4e-3);

struct ShearModulus {
  double mu_au = 0.0;
  double mu_in_2wpln = 0.0; // mu_x / (2 omega_pl n0)
};

// Exchange shear modulus from the difference of the two q -> 0 limits.
ShearModulus mu_x(const heg::HegParams &p);

// 3 (3/2)^(2/3) / (64 pi^(5/3)), the r_s-independent coefficient of mu_x r_s^4.
double mu_x_coefficient();

} // namespace tdlhf::response
