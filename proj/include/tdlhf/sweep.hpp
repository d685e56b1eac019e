#pragma once

// Parameter sweeps behind the fx / eps / static-fx / mux commands, and the
// tabular output they share. Reduced units on input (q / k_F, omega / eps_F),
// atomic units in the payload.

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace tdlhf::app {

using cd = std::complex<double>;

enum class Format { csv, json };

// Throws DomainError for anything other than "csv" / "json".
Format parse_format(const std::string &s);

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // CSV: "# key: value" lines, then the column header, then rows.
  // JSON: {"metadata": {...}, "columns": [...], "rows": [[...], ...]}.
  // Non-finite values print as nan / inf in CSV and null in JSON.
  std::string render(Format f) const;
};

struct SweepRequest {
  double r_s = 5.0;
  double q_over_kF = 0.5;
  double omega_min = 0.0; // eps_F
  double omega_max = 3.0;
  int count = 300;
  double eta_over_epsF = 1e-3;
  double tol = 1e-5;   // relative tolerance of the ratio quadrature
  bool oracle = false; // dense-sum ratio instead of the adaptive quadrature

  // count >= 2, min < max, min >= 0, eta > 0, r_s > 0, q >= q_min.
  void validate() const;
};

struct SweepPoint {
  double omega_over_epsF = 0.0;
  cd chi_s, f_x, eps, eps_lindhard;
  bool at_pole = false;
};

// Samples are evaluated in parallel over omega and returned in order. The
// first failure (lowest omega) is rethrown after the loop.
std::vector<SweepPoint> compute_sweep(const SweepRequest &req);

Table fx_table(const SweepRequest &req, const std::vector<SweepPoint> &pts);
Table eps_table(const SweepRequest &req, const std::vector<SweepPoint> &pts);

struct StaticRequest {
  double r_s = 5.0;
  double q_min = 0.05; // k_F
  double q_max = 5.0;
  int count = 100;
  double tol = 1e-6;

  void validate() const;
};

// Columns q_over_kF, fx_au, asymptote_au (= -2 pi / q^2) on a uniform q grid.
Table static_fx_table(const StaticRequest &req);

// Columns r_s, mu_au, mu_over_2wpln.
Table mux_table(const std::vector<double> &r_s);

// Throws IoError when the file cannot be written.
void write_text(const std::string &path, const std::string &content);

} // namespace tdlhf::app
