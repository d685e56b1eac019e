// tdlhf: command-line front end.
//
// Exit codes: 0 success, 1 selftest failure, 2 bad arguments, 3 numerical
// non-convergence, 4 I/O error. Failures also print one JSON line to stderr:
//   error: {"exit_code": 3, "kind": "convergence", "message": "..."}

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdlhf/errors.hpp"
#include "tdlhf/run_config.hpp"
#include "tdlhf/selftest.hpp"
#include "tdlhf/sweep.hpp"
#include "tdlhf/tdlhf_grid.hpp"
#include "tdlhf/version.hpp"

namespace {

using namespace tdlhf;

int fail(int code, const char *kind, const std::string &msg) {
  nlohmann::ordered_json j;
  j["exit_code"] = code;
  j["kind"] = kind;
  j["message"] = msg;
  std::cerr << "error: " << j.dump() << "\n";
  return code;
}

void emit(const std::string &path, const std::string &content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    app::write_text(path, content);
}

std::string shortest(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

app::Table scf_table(const app::RunConfig &cfg, const grid::GroundState &gs,
                     const grid::Vec &v0, nlohmann::ordered_json &summary) {
  app::Table t;
  t.metadata = {{"program", std::string("tdlhf ") + kVersion},
                {"command", "tdlhf scf"},
                {"config", cfg.canonical()},
                {"iterations", std::to_string(gs.iterations)},
                {"energy_total_au", shortest(gs.energies.total)},
                {"energy_exchange_au", shortest(gs.energies.exchange)}};
  summary["iterations"] = gs.iterations;
  summary["energy_total_au"] = gs.energies.total;
  summary["eigenvalues_au"] = gs.energies.eigenvalues;
  const int n = cfg.grid.n_points;
  if (cfg.electrons == 1) {
    const double d = (gs.v_x + gs.v_h).cwiseAbs().maxCoeff();
    t.metadata.emplace_back("max_abs_vx_plus_vh", shortest(d));
    summary["max_abs_vx_plus_vh"] = d;
  } else if (cfg.electrons == 2) {
    const int edge = n / 20;
    const grid::Vec s = (gs.v_x + 0.5 * gs.v_h).segment(edge, n - 2 * edge);
    const double spread = s.maxCoeff() - s.minCoeff();
    t.metadata.emplace_back("interior_spread_vx_plus_half_vh", shortest(spread));
    summary["interior_spread_vx_plus_half_vh"] = spread;
  }
  t.metadata.emplace_back("units", "x in bohr; potentials in hartree");
  t.columns = {"x", "density", "v0", "v_h", "v_x"};
  for (int i = 0; i < n; ++i)
    t.rows.push_back({cfg.grid.x(i), gs.density(i), v0(i), gs.v_h(i), gs.v_x(i)});
  return t;
}

int run_tdlhf(const std::string &mode, const std::string &config_path,
              const std::string &prefix, app::Format fmt) {
  const auto cfg = app::RunConfig::load(config_path);
  const grid::Vec v0 = cfg.v0.sample(cfg.grid);
  const auto gs =
      grid::scf_ground_state(cfg.grid, cfg.interaction, v0, cfg.electrons, cfg.scf);
  nlohmann::ordered_json summary;
  summary["command"] = "tdlhf " + mode;
  const std::string ext = fmt == app::Format::csv ? ".csv" : ".json";
  const app::Table st = scf_table(cfg, gs, v0, summary);
  if (mode == "scf") {
    const std::string path = prefix + "_scf" + ext;
    app::write_text(path, st.render(fmt));
    summary["files"] = {path};
    std::cout << summary.dump() << "\n";
    return 0;
  }
  const auto tr = grid::propagate(cfg.grid, cfg.interaction, v0, cfg.drive,
                                  gs.orbitals, cfg.propagation);
  std::vector<std::string> files;
  if (cfg.write_dipole) {
    app::Table t;
    t.metadata = {{"program", std::string("tdlhf ") + kVersion},
                  {"command", "tdlhf run"},
                  {"config", cfg.canonical()},
                  {"max_norm_drift_per_step", shortest(tr.max_norm_drift)},
                  {"units", "t in hartree^-1; dipole in bohr; energy in hartree"}};
    t.columns = {"t", "dipole", "norm", "energy"};
    for (const auto &p : tr.points)
      t.rows.push_back({p.t, p.dipole, p.norm, p.energy});
    files.push_back(prefix + "_dipole" + ext);
    app::write_text(files.back(), t.render(fmt));
  }
  if (cfg.write_density || cfg.write_vx) {
    files.push_back(prefix + "_snapshots.bin");
    grid::write_snapshots(files.back(), cfg.grid, tr.snapshots, cfg.write_density,
                          cfg.write_vx);
  }
  summary["steps"] = cfg.propagation.n_steps;
  summary["max_norm_drift_per_step"] = tr.max_norm_drift;
  summary["files"] = files;
  std::cout << summary.dump() << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App cli{"Exchange kernel of the electron gas and 1D TD-LHF solver"};
  cli.set_version_flag("--version", std::string("tdlhf ") + kVersion);
  cli.require_subcommand(1);

  std::string out, format = "csv";
  app::SweepRequest sweep;
  auto add_sweep = [&](CLI::App *c) {
    c->add_option("--rs", sweep.r_s, "density parameter r_s")->capture_default_str();
    c->add_option("--q", sweep.q_over_kF, "wave vector in units of k_F")
        ->capture_default_str();
    c->add_option("--omega-min", sweep.omega_min, "first frequency (eps_F)")
        ->capture_default_str();
    c->add_option("--omega-max", sweep.omega_max, "last frequency (eps_F)")
        ->capture_default_str();
    c->add_option("--omega-count", sweep.count, "number of frequencies")
        ->capture_default_str();
    c->add_option("--eta", sweep.eta_over_epsF, "broadening (eps_F)")
        ->capture_default_str();
    c->add_option("--tol", sweep.tol, "relative quadrature tolerance")
        ->capture_default_str();
    c->add_flag("--oracle", sweep.oracle, "use the dense-sum reference evaluator");
    c->add_option("--out", out, "output file (default stdout)");
    c->add_option("--format", format, "csv or json")->capture_default_str();
  };
  auto *fx = cli.add_subcommand("fx", "f_x(q, omega) sweep");
  add_sweep(fx);
  auto *eps = cli.add_subcommand("eps", "dielectric function sweep");
  add_sweep(eps);

  app::StaticRequest stat;
  auto *sfx = cli.add_subcommand("static-fx", "static kernel and its asymptote");
  sfx->add_option("--rs", stat.r_s, "density parameter r_s")->capture_default_str();
  sfx->add_option("--q-min", stat.q_min, "first q (k_F)")->capture_default_str();
  sfx->add_option("--q-max", stat.q_max, "last q (k_F)")->capture_default_str();
  sfx->add_option("--q-count", stat.count, "number of q values")->capture_default_str();
  sfx->add_option("--tol", stat.tol, "relative quadrature tolerance")
      ->capture_default_str();
  sfx->add_option("--out", out, "output file (default stdout)");
  sfx->add_option("--format", format, "csv or json")->capture_default_str();

  std::vector<double> mux_rs{1, 2, 3, 4, 5};
  auto *mux = cli.add_subcommand("mux", "exchange shear modulus table");
  mux->add_option("--rs", mux_rs, "r_s values")->capture_default_str();
  mux->add_option("--out", out, "output file (default stdout)");
  mux->add_option("--format", format, "csv or json")->capture_default_str();

  std::string mode, config, prefix = "tdlhf";
  auto *td = cli.add_subcommand("tdlhf", "1D TD-LHF ground state or propagation");
  td->add_option("mode", mode, "scf or run")
      ->required()
      ->check(CLI::IsMember({"scf", "run"}));
  td->add_option("--config", config, "JSON run configuration")->required();
  td->add_option("--out", prefix, "output file prefix")->capture_default_str();
  td->add_option("--format", format, "csv or json")->capture_default_str();

  std::string level;
  auto *st = cli.add_subcommand("selftest", "acceptance suite");
  st->add_option("level", level, "fast or full")
      ->required()
      ->check(CLI::IsMember({"fast", "full"}));
  st->add_option("--out", out, "report file (default stdout)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return cli.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return cli.exit(e);
  } catch (const CLI::ParseError &e) {
    return fail(2, "arguments", e.what());
  }

  try {
    const app::Format fmt = app::parse_format(format);
    if (fx->parsed() || eps->parsed()) {
      const auto pts = app::compute_sweep(sweep);
      emit(out, (fx->parsed() ? app::fx_table(sweep, pts) : app::eps_table(sweep, pts))
                    .render(fmt));
    } else if (sfx->parsed()) {
      emit(out, app::static_fx_table(stat).render(fmt));
    } else if (mux->parsed()) {
      emit(out, app::mux_table(mux_rs).render(fmt));
    } else if (td->parsed()) {
      return run_tdlhf(mode, config, prefix, fmt);
    } else if (st->parsed()) {
      const auto rep = app::run_selftest(
          level == "full" ? app::SelftestLevel::full : app::SelftestLevel::fast,
          [](const app::CriterionResult &c) {
            std::fprintf(stderr, "criterion %d %s (%.1f s)\n", c.id,
                         c.passed ? "pass" : "FAIL", c.seconds);
          });
      emit(out, rep.text());
      return rep.all_passed() ? 0 : 1;
    }
  } catch (const DomainError &e) {
    return fail(2, "domain", e.what());
  } catch (const ConvergenceError &e) {
    return fail(3, "convergence", e.what());
  } catch (const SingularSystemError &e) {
    return fail(3, "singular_system", e.what());
  } catch (const IoError &e) {
    return fail(4, "io", e.what());
  } catch (const Error &e) {
    return fail(3, "numerical", e.what());
  }
  return 0;
}
