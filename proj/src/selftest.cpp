#include "tdlhf/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tdlhf/errors.hpp"
#include "tdlhf/oracle.hpp"
#include "tdlhf/response_kernel.hpp"
#include "tdlhf/special_integrals.hpp"
#include "tdlhf/sweep.hpp"
#include "tdlhf/tdlhf_grid.hpp"
#include "tdlhf/version.hpp"

namespace tdlhf::app {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

std::string fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

class Clock {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Context {
  bool full;
  std::string runtime_note(double limit, double seconds, bool &ok) const {
    if (!full)
      return "";
    ok = ok && seconds < limit;
    return seconds < limit ? "; runtime within limit" : "; runtime limit exceeded";
  }
};

// 1. mu_x reference values
CriterionResult table_one(const Context &ctx) {
  Clock clock;
  CriterionResult r{1, "shear modulus reference values", false, {}, 0.0};
  const std::vector<double> rs{1, 2, 3, 4, 5};
  const double reference[] = {0.01102, 0.01559, 0.01909, 0.02204, 0.02464};
  const Table t = mux_table(rs);
  bool ok = true;
  std::string d;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double v = t.rows[i][2];
    ok = ok && std::abs(v - reference[i]) < 5e-5;
    d += (i ? " " : "") + std::string("r_s=") + fixed(rs[i], 0) + ":" + fixed(v, 5) +
         "(" + fixed(reference[i], 5) + ")";
  }
  r.seconds = clock.seconds();
  d += ctx.runtime_note(1.0, r.seconds, ok);
  r.passed = ok;
  r.detail = d;
  return r;
}

// 2. r_s^4 scaling and the coefficient
CriterionResult scaling(const Context &) {
  Clock clock;
  CriterionResult r{2, "mu_x r_s^4 coefficient", false, {}, 0.0};
  const double c = response::mu_x_coefficient();
  const double expect =
      3.0 * std::pow(1.5, 2.0 / 3.0) / (64.0 * std::pow(kPi, 5.0 / 3.0));
  double worst = 0.0;
  for (double rs : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0}) {
    const double mu = response::mu_x(heg::from_rs(rs)).mu_au;
    worst = std::max(worst, rel(mu * std::pow(rs, 4), expect));
  }
  const bool two_digits = std::abs(std::round(c * 1e4) / 1e4 - 0.0091) < 1e-12;
  r.passed = worst < 1e-12 && two_digits && rel(c, expect) < 1e-14;
  r.detail = "coefficient " + num(c, 10) + ", worst rel dev over r_s " + num(worst, 2) +
             ", rounds to " + fixed(c, 4);
  r.seconds = clock.seconds();
  return r;
}

// 3. q -> 0 limits and the large-q asymptote
CriterionResult limits(const Context &ctx) {
  Clock clock;
  CriterionResult r{3, "kernel limits", false, {}, 0.0};
  const auto p = heg::from_rs(4.0);
  const double kF2 = p.k_F * p.k_F;
  quad::QuadSpec spec;
  spec.rel_tol = 1e-6;
  const double q = 1e-3 * p.k_F;

  const auto dyn = response::f_x_eta_extrapolated(p, q, 0.5 * p.eps_F, spec);
  const double dyn_ratio = dyn.value.real() / response::fx_limit_q0_finite_omega(p);
  const double stat = response::f_x_static(p, q, spec) * kF2;
  const double numerator = -stat;
  const bool five_digits = std::floor(numerator * 1e4) == 31415.0;
  quad::QuadSpec big = spec;
  big.rel_tol = 1e-6;
  const double qb = 10.0 * p.k_F;
  const double asym = response::f_x_static(p, qb, big) * qb * qb / (-2.0 * kPi);

  bool ok = std::abs(dyn_ratio - 1.0) < 0.01 && std::abs(numerator / kPi - 1.0) < 0.01 &&
            five_digits && std::abs(asym - 1.0) < 0.02;
  r.seconds = clock.seconds();
  r.detail = "f_x(1e-3 k_F, 0.5 eps_F)/(-3pi/4k_F^2) = " + fixed(dyn_ratio, 7) +
             "; -k_F^2 f_x_static(1e-3 k_F) = " + fixed(numerator, 7) +
             "; f_x_static(10 k_F) q^2/(-2pi) = " + fixed(asym, 5) +
             ctx.runtime_note(60.0, r.seconds, ok);
  r.passed = ok;
  return r;
}

// 4. closed forms against brute-force integrals
CriterionResult closed_forms(const Context &ctx) {
  Clock clock;
  CriterionResult r{4, "A, C, B against brute-force integrals", false, {}, 0.0};
  const auto p = heg::from_rs(2.0);
  const double kF = p.k_F;
  oracle::OracleSpec ospec;
  oracle::OracleSpec aspec = ospec;
  aspec.radial_nodes = aspec.angular_nodes = ctx.full ? 4000 : 800;
  const quad::QuadSpec bq{.rel_tol = 1e-10, .abs_tol = 1e-14};

  std::vector<double> qa{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  std::vector<double> kc{0.0, 0.3, 0.7, 0.99, 1.0, 1.01, 1.5, 3.0};
  std::vector<double> qb{0.2, 0.6, 1.0, 1.4, 1.8};
  std::vector<double> kb{0.1, 0.5, 0.9, 1.3, 1.7};
  std::vector<double> yb{-0.8, 0.1, 0.9};
  if (!ctx.full) {
    qa = {0.0, 1.0};
    kc = {0.0, 0.7};
    qb = {0.6};
    kb = {0.5, 1.3};
    yb = {0.1};
  }
  double wa = 0.0, wc = 0.0, wb = 0.0;
  for (double q : qa)
    wa = std::max(wa, rel(oracle::a_oracle(p, q * kF, aspec), special::a_of_q(p, q * kF)));
  for (double k : kc)
    wc = std::max(wc, rel(oracle::c_oracle(p, k * kF, ospec), special::c_of_k(p, k * kF)));
  int nb = 0;
  for (double q : qb)
    for (double k : kb)
      for (double y : yb) {
        const double fast = special::b_of_qk(p, {q * kF, k * kF, y}, bq);
        wb = std::max(wb, rel(oracle::b_oracle(p, q * kF, k * kF, y, ospec), fast));
        ++nb;
      }
  bool ok = wa < 1e-3 && wc < 1e-3 && wb < 1e-3;
  r.seconds = clock.seconds();
  r.detail = "worst rel dev A " + num(wa, 2) + " (" + std::to_string(qa.size()) +
             " q), C " + num(wc, 2) + " (" + std::to_string(kc.size()) + " k), B " +
             num(wb, 2) + " (" + std::to_string(nb) + " points)" +
             ctx.runtime_note(300.0, r.seconds, ok);
  r.passed = ok;
  return r;
}

// 5. Im f_x vanishes outside the particle-hole continuum
CriterionResult support(const Context &ctx) {
  Clock clock;
  CriterionResult r{5, "support of Im f_x", false, {}, 0.0};
  quad::QuadSpec spec;
  spec.rel_tol = 1e-6;
  double worst_out = 0.0, least_in = 1e300;
  const std::vector<double> rs_list =
      ctx.full ? std::vector<double>{2.0, 5.0} : std::vector<double>{5.0};
  for (double rs : rs_list) {
    const auto p = heg::from_rs(rs);
    const double eta = 1e-6 * p.eps_F;
    for (double qr : {0.5, 1.5}) {
      const double q = qr * p.k_F;
      const auto [lo, hi] = heg::ph_continuum_bounds(p, q);
      std::vector<double> outside{1.05 * hi};
      if (lo > 0.0)
        outside.push_back(0.95 * lo);
      for (double w : outside) {
        const cd f = response::f_x(p, q, w, eta, spec);
        worst_out = std::max(worst_out, std::abs(f.imag()) / std::abs(f.real()));
      }
      const cd f = response::f_x(p, q, 0.5 * (lo + hi), eta, spec);
      least_in = std::min(least_in, std::abs(f.imag()) / std::abs(f.real()));
    }
  }
  r.passed = worst_out < 1e-6 && least_in > 1e-3;
  r.detail = "outside max |Im/Re| " + num(worst_out, 2) + ", inside min |Im/Re| " +
             num(least_in, 2);
  r.seconds = clock.seconds();
  return r;
}

// 6. Lindhard function
CriterionResult lindhard(const Context &ctx) {
  Clock clock;
  CriterionResult r{6, "Lindhard suite", false, {}, 0.0};
  const auto p = heg::from_rs(5.0);
  const double kF = p.k_F;
  const double stat = response::chi_s_limit(p, 1e-3 * kF, 0.0).real();
  const double stat_dev = rel(stat, -kF / (kPi * kPi));

  double fsum_dev = 0.0;
  for (double qr : {0.5, 1.5}) {
    const double q = qr * kF;
    const auto [lo, hi] = heg::ph_continuum_bounds(p, q);
    quad::QuadSpec s;
    s.rel_tol = 1e-10;
    const double brk[] = {lo};
    auto f = [&](double w) { return w * response::chi_s_limit(p, q, w).imag(); };
    const double integral = quad::integrate_1d(f, 0.0, hi, s, brk).value;
    fsum_dev = std::max(fsum_dev, rel(integral, -0.5 * kPi * p.n0 * q * q));
  }

  oracle::OracleSpec ospec;
  double ksum_dev = 0.0;
  const double pts[3][2] = {{0.5, 0.8}, {1.5, 2.0}, {0.5, 0.0}};
  const int n_pts = ctx.full ? 3 : 1;
  for (int i = 0; i < n_pts; ++i) {
    const double q = pts[i][0] * kF, w = pts[i][1] * p.eps_F;
    const double eta = ospec.eta_over_epsF * p.eps_F;
    const cd a = oracle::chi_s_ksum(p, q, w, eta, ospec);
    const cd b = response::chi_s(p, q, w, eta);
    ksum_dev = std::max(ksum_dev, std::abs(a - b) / std::abs(b));
  }
  r.passed = stat_dev < 1e-4 && fsum_dev < 0.01 && ksum_dev < 1e-3;
  r.detail = "static q->0 rel dev " + num(stat_dev, 2) + ", f-sum rel dev " +
             num(fsum_dev, 2) + ", k-sum rel dev " + num(ksum_dev, 2);
  r.seconds = clock.seconds();
  return r;
}

// 7. f_x and epsilon sweeps
CriterionResult response_sweeps(const Context &ctx) {
  Clock clock;
  CriterionResult r{7, "f_x and epsilon sweeps", false, {}, 0.0};
  bool ok = true;
  std::string d;
  for (double rs : {2.0, 5.0}) {
    SweepRequest req;
    req.r_s = rs;
    req.count = ctx.full ? 300 : 12;
    try {
      const auto pts = compute_sweep(req);
      const Table fx = fx_table(req, pts);
      const Table eps = eps_table(req, pts);
      int finite = 0, im_sign_changes = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto &s = pts[i];
        if (std::isfinite(s.f_x.real()) && std::isfinite(s.f_x.imag()) &&
            std::isfinite(s.eps.real()) && std::isfinite(s.eps.imag()))
          ++finite;
        if (i > 0 && (pts[i - 1].f_x.imag() < 0.0) != (s.f_x.imag() < 0.0) &&
            pts[i - 1].f_x.imag() != 0.0)
          ++im_sign_changes;
      }
      const bool shape =
          fx.rows.size() == static_cast<std::size_t>(req.count) &&
          eps.rows.size() == static_cast<std::size_t>(req.count) &&
          fx.columns.size() == 3 && eps.columns.size() == 5 && finite == req.count;
      ok = ok && shape;
      const double kF2 = heg::from_rs(rs).k_F * heg::from_rs(rs).k_F;
      d += (d.empty() ? "" : "; ") + std::string("r_s=") + fixed(rs, 0) + ": " +
           std::to_string(finite) + "/" + std::to_string(req.count) +
           " finite rows, k_F^2 f_x(0) = " + fixed(pts.front().f_x.real() * kF2, 5) +
           ", Im f_x sign changes " + std::to_string(im_sign_changes);
    } catch (const Error &e) {
      ok = false;
      d += (d.empty() ? "" : "; ") + std::string("r_s=") + fixed(rs, 0) +
           ": failed: " + e.what();
    }
  }
  r.passed = ok;
  r.detail = d;
  r.seconds = clock.seconds();
  return r;
}

// 8. real-space TD-LHF
CriterionResult real_space(const Context &ctx) {
  Clock clock;
  CriterionResult r{8, "TD-LHF real-space suite", false, {}, 0.0};
  using namespace grid;
  const Grid1D g = Grid1D::make(-20.0, 20.0, 400);
  const Interaction w;
  bool ok = true;
  std::string d;
  try {
    StaticPotential well;
    well.depth = 1.0;
    const GroundState one = scf_ground_state(g, w, well.sample(g), 1);
    const double sif = (one.v_h + one.v_x).cwiseAbs().maxCoeff();
    ok = ok && sif <= 1e-8;

    well.depth = 2.0;
    const Vec v0 = well.sample(g);
    const GroundState two = scf_ground_state(g, w, v0, 2);
    const int edge = g.n_points / 20;
    const Vec s = (two.v_x + 0.5 * two.v_h).segment(edge, g.n_points - 2 * edge);
    const double spread = s.maxCoeff() - s.minCoeff();
    ok = ok && spread <= 1e-6;

    Drive kick;
    kick.envelope = Drive::Envelope::kick;
    kick.E0 = 0.01;
    PropagationOptions opt;
    opt.dt = 0.01;
    opt.n_steps = ctx.full ? 1000 : 100;
    const Trajectory lhf = propagate(g, w, v0, kick, two.orbitals, opt);
    const auto hf = oracle::hf_n2_ground_state(g, w, v0);
    const Trajectory ref = oracle::tdhf_n2(g, w, v0, kick, hf.orbitals, opt);
    PropagationOptions shifted = opt;
    shifted.vx_shift = 0.37;
    const Trajectory moved = propagate(g, w, v0, kick, two.orbitals, shifted);

    double dmax = 0.0, ddiff = 0.0, dshift = 0.0;
    for (std::size_t i = 0; i < lhf.points.size(); ++i) {
      dmax = std::max(dmax, std::abs(ref.points[i].dipole));
      ddiff = std::max(ddiff, std::abs(lhf.points[i].dipole - ref.points[i].dipole));
      dshift = std::max(dshift, std::abs(lhf.points[i].dipole - moved.points[i].dipole));
    }
    const double tdhf_rel = ddiff / dmax, shift_rel = dshift / dmax;
    const double drift = std::max(lhf.max_norm_drift, moved.max_norm_drift);
    ok = ok && tdhf_rel <= 1e-4 && drift < 1e-10 && shift_rel <= 1e-10;
    d = "N=1 max|v_H+v_x| " + num(sif, 2) + "; N=2 spread of v_x+v_H/2 " +
        num(spread, 2) + "; dipole vs TDHF rel " + num(tdhf_rel, 2) + " over " +
        fixed(opt.n_steps * opt.dt, 1) + " a.u.; max norm drift/step " + num(drift, 2) +
        "; shift invariance rel " + num(shift_rel, 2);
  } catch (const Error &e) {
    ok = false;
    d = std::string("failed: ") + e.what();
  }
  r.seconds = clock.seconds();
  d += ctx.runtime_note(120.0, r.seconds, ok);
  r.passed = ok;
  r.detail = d;
  return r;
}

} // namespace

bool SelftestReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult &c) { return c.passed; });
}

std::string SelftestReport::text() const {
  std::string out = std::string("tdlhf ") + kVersion + " selftest " +
                    (level == SelftestLevel::full ? "full" : "fast") + "\n";
  for (const auto &c : results)
    out += std::string(c.passed ? "[PASS] " : "[FAIL] ") + std::to_string(c.id) + " " +
           c.title + ": " + c.detail + "\n";
  return out;
}

SelftestReport run_selftest(SelftestLevel level,
                            const std::function<void(const CriterionResult &)> &progress) {
  const Context ctx{level == SelftestLevel::full};
  SelftestReport rep;
  rep.level = level;
  for (auto check : {table_one, scaling, limits, closed_forms, support, lindhard,
                     response_sweeps, real_space}) {
    rep.results.push_back(check(ctx));
    if (progress)
      progress(rep.results.back());
  }
  return rep;
}

} // namespace tdlhf::app
