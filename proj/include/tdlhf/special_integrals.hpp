#pragma once

#include "tdlhf/heg_model.hpp"
#include "tdlhf/quadrature.hpp"

namespace tdlhf::special {

// Arguments of the Fermi-sphere overlap integral B: magnitudes q and k and
// the cosine y of the angle between them.
struct BArgs {
  double q = 0.0;
  double k = 0.0;
  double y = 0.0;
};

// Switch thresholds of h_func: series expansions are used for
// k < kSmallK * p, |k - p| < kNearP * p and k > kLargeK * p.
inline constexpr double kSmallK = 1e-4;
inline constexpr double kNearP = 1e-6;
inline constexpr double kLargeK = 20.0;

// Fraction of the Fermi-sphere pair density surviving a shift by q:
// A(q) = Theta(2k_F - q) (2k_F - q)^2 (4k_F + q) / (48 pi^2).
double a_of_q(const heg::HegParams &p, double q);

// H(k, p) = (pi/k) [(p^2 - k^2) log|(p+k)/(p-k)| + 2kp], which equals the
// integral of 1/|k - k1|^2 over the ball |k1| < p. Limits: 4 pi p at k = 0,
// 2 pi p at k = p, 4 pi p^3 / (3 k^2) for k >> p.
double h_func(double k, double p);

// C(k) = 2/(2pi)^3 H(k, k_F).
double c_of_k(const heg::HegParams &p, double k);

// Angular kernel of the single-fold representation of B. x is clamped to
// [-1, 1] when within 1e-12 outside; larger excursions throw DomainError, as
// does evaluation exactly on the logarithmic singularity k == k1.
double p_func(double k, double k1, double x, double y);

// The literal two-logarithm expression for P, without the cancellation-free
// rewrite used by p_func. Kept for cross-checks.
double p_func_literal(double k, double k1, double x, double y);

// B(q, k, y). Throws ConvergenceError (carrying the error estimate) when the
// k1 quadrature misses its tolerance.
double b_of_qk(const heg::HegParams &p, const BArgs &args,
               const quad::QuadSpec &spec);

// B(q, k, y) - C(k), assembled without forming B first. This is the quantity
// the response kernel integrates; it is O(q) for small q.
double b_minus_c(const heg::HegParams &p, const BArgs &args,
                 const quad::QuadSpec &spec);

} // namespace tdlhf::special
