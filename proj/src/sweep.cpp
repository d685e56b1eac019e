#include "tdlhf/sweep.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "tdlhf/errors.hpp"
#include "tdlhf/heg_model.hpp"
#include "tdlhf/oracle.hpp"
#include "tdlhf/response_kernel.hpp"
#include "tdlhf/version.hpp"

namespace tdlhf::app {

namespace {

// Shortest string that reads back to the same double.
std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string cell(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

quad::QuadSpec ratio_spec(double tol) {
  quad::QuadSpec s;
  s.rel_tol = tol;
  return s;
}

std::vector<std::pair<std::string, std::string>>
sweep_metadata(const char *command, const SweepRequest &req) {
  const auto p = heg::from_rs(req.r_s);
  std::string regen = std::string("tdlhf ") + command + " --rs " + shortest(req.r_s) +
                      " --q " + shortest(req.q_over_kF) + " --omega-min " +
                      shortest(req.omega_min) + " --omega-max " +
                      shortest(req.omega_max) + " --omega-count " +
                      std::to_string(req.count) + " --eta " +
                      shortest(req.eta_over_epsF) + " --tol " + shortest(req.tol);
  if (req.oracle)
    regen += " --oracle";
  return {{"program", std::string("tdlhf ") + kVersion},
          {"command", command},
          {"r_s", shortest(req.r_s)},
          {"q_over_kF", shortest(req.q_over_kF)},
          {"eta_over_epsF", shortest(req.eta_over_epsF)},
          {"omega_range_epsF", shortest(req.omega_min) + " " + shortest(req.omega_max) +
                                   " " + std::to_string(req.count)},
          {"ratio_evaluator", req.oracle ? "dense_sum" : "adaptive_quadrature"},
          {"rel_tol", shortest(req.tol)},
          {"k_F_au", shortest(p.k_F)},
          {"eps_F_au", shortest(p.eps_F)},
          {"regenerate", regen}};
}

} // namespace

Format parse_format(const std::string &s) {
  if (s == "csv")
    return Format::csv;
  if (s == "json")
    return Format::json;
  throw DomainError("format must be csv or json");
}

std::string Table::render(Format f) const {
  std::string out;
  if (f == Format::csv) {
    for (const auto &[k, v] : metadata)
      out += "# " + k + ": " + v + "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
      out += (c ? "," : "") + columns[c];
    out += "\n";
    for (const auto &row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out += (c ? "," : "") + cell(row[c]);
      out += "\n";
    }
    return out;
  }
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto &[k, v] : metadata)
    j["metadata"][k] = v;
  j["columns"] = columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto &row : rows) {
    auto r = nlohmann::ordered_json::array();
    for (double v : row)
      r.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
    j["rows"].push_back(r);
  }
  return j.dump(1) + "\n";
}

void SweepRequest::validate() const {
  if (!(r_s > 0.0) || !std::isfinite(r_s))
    throw DomainError("--rs must be positive");
  if (!(q_over_kF >= response::kQMinOverKF))
    throw DomainError("--q must be at least 1e-3 (units of k_F)");
  if (count < 2)
    throw DomainError("--omega-count must be at least 2");
  if (!(omega_min >= 0.0) || !(omega_min < omega_max) || !std::isfinite(omega_max))
    throw DomainError("need 0 <= --omega-min < --omega-max");
  if (!(eta_over_epsF > 0.0))
    throw DomainError("--eta must be positive");
  if (!(tol > 0.0 && tol < 1.0))
    throw DomainError("--tol must lie in (0, 1)");
}

std::vector<SweepPoint> compute_sweep(const SweepRequest &req) {
  req.validate();
  const auto p = heg::from_rs(req.r_s);
  const double q = req.q_over_kF * p.k_F;
  const double eta = req.eta_over_epsF * p.eps_F;
  const auto spec = ratio_spec(req.tol);
  oracle::OracleSpec ospec;
  ospec.radial_nodes = 2000;
  ospec.angular_nodes = 1000;

  const int n = req.count;
  std::vector<SweepPoint> pts(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    try {
      SweepPoint &s = pts[ui];
      s.omega_over_epsF =
          req.omega_min + (req.omega_max - req.omega_min) * i / (n - 1);
      const double omega = s.omega_over_epsF * p.eps_F;
      s.chi_s = response::chi_s(p, q, omega, eta);
      const cd ratio = req.oracle ? oracle::ratio_riemann(p, q, omega, eta, ospec)
                                  : [&] {
                                      const auto r = response::ratio_vx_vs(p, q, omega, eta, spec);
                                      return r.value;
                                    }();
      s.f_x = ratio / s.chi_s;
      const auto d = response::epsilon_from(q, s.chi_s, s.f_x);
      s.eps = d.value;
      s.at_pole = d.at_pole;
      s.eps_lindhard = response::epsilon_lindhard(p, q, omega, eta);
    } catch (...) {
      errors[ui] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return pts;
}

Table fx_table(const SweepRequest &req, const std::vector<SweepPoint> &pts) {
  Table t;
  t.metadata = sweep_metadata("fx", req);
  t.metadata.emplace_back("units", "omega in eps_F; f_x in hartree bohr^3");
  t.columns = {"omega_over_epsF", "re_fx_au", "im_fx_au"};
  for (const auto &s : pts)
    t.rows.push_back({s.omega_over_epsF, s.f_x.real(), s.f_x.imag()});
  return t;
}

Table eps_table(const SweepRequest &req, const std::vector<SweepPoint> &pts) {
  Table t;
  t.metadata = sweep_metadata("eps", req);
  t.metadata.emplace_back("units", "omega in eps_F; eps dimensionless");
  t.columns = {"omega_over_epsF", "re_eps", "im_eps", "re_eps_lindhard",
               "im_eps_lindhard"};
  for (const auto &s : pts)
    t.rows.push_back({s.omega_over_epsF, s.eps.real(), s.eps.imag(),
                      s.eps_lindhard.real(), s.eps_lindhard.imag()});
  return t;
}

void StaticRequest::validate() const {
  if (!(r_s > 0.0) || !std::isfinite(r_s))
    throw DomainError("--rs must be positive");
  if (!(q_min >= response::kQMinOverKF) || !(q_min < q_max) || !std::isfinite(q_max))
    throw DomainError("need 1e-3 <= --q-min < --q-max (units of k_F)");
  if (count < 2)
    throw DomainError("--q-count must be at least 2");
  if (!(tol > 0.0 && tol < 1.0))
    throw DomainError("--tol must lie in (0, 1)");
}

Table static_fx_table(const StaticRequest &req) {
  req.validate();
  const auto p = heg::from_rs(req.r_s);
  const auto spec = ratio_spec(req.tol);
  const int n = req.count;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    try {
      const double qr = req.q_min + (req.q_max - req.q_min) * i / (n - 1);
      const double q = qr * p.k_F;
      rows[ui] = {qr, response::f_x_static(p, q, spec),
                  -2.0 * std::numbers::pi / (q * q)};
    } catch (...) {
      errors[ui] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  Table t;
  t.metadata = {{"program", std::string("tdlhf ") + kVersion},
                {"command", "static-fx"},
                {"r_s", shortest(req.r_s)},
                {"q_range_kF", shortest(req.q_min) + " " + shortest(req.q_max) + " " +
                                   std::to_string(req.count)},
                {"rel_tol", shortest(req.tol)},
                {"k_F_au", shortest(p.k_F)},
                {"units", "q in k_F; f_x in hartree bohr^3"},
                {"regenerate", "tdlhf static-fx --rs " + shortest(req.r_s) +
                                   " --q-min " + shortest(req.q_min) + " --q-max " +
                                   shortest(req.q_max) + " --q-count " +
                                   std::to_string(req.count) + " --tol " +
                                   shortest(req.tol)}};
  t.columns = {"q_over_kF", "fx_au", "asymptote_au"};
  t.rows = std::move(rows);
  return t;
}

Table mux_table(const std::vector<double> &r_s) {
  if (r_s.empty())
    throw DomainError("mux: need at least one r_s");
  Table t;
  std::string list;
  for (double r : r_s) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw DomainError("mux: r_s values must be positive");
    list += (list.empty() ? "" : ",") + shortest(r);
    const auto mu = response::mu_x(heg::from_rs(r));
    t.rows.push_back({r, mu.mu_au, mu.mu_in_2wpln});
  }
  t.metadata = {{"program", std::string("tdlhf ") + kVersion},
                {"command", "mux"},
                {"r_s", list},
                {"units", "mu_au in hartree / bohr^3; mu_over_2wpln in 2 omega_pl n0"},
                {"regenerate", "tdlhf mux --rs " + list}};
  t.columns = {"r_s", "mu_au", "mu_over_2wpln"};
  return t;
}

void write_text(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out)
    throw IoError("write failed for " + path);
}

} // namespace tdlhf::app
