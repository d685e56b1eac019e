#pragma once

// JSON run configuration for the real-space solver.
//
//   {"grid": {"x_min": -20, "x_max": 20, "n_points": 400},
//    "interaction": {"softening": 1.0},
//    "electrons": 2,
//    "v0": {"shape": "soft_well", "depth": 2.0, "softening": 1.0},
//    "drive": {"envelope": "kick", "E0": 0.01},
//    "dt": 0.01, "n_steps": 1000, "scheme": "cn",
//    "outputs": ["dipole", "density_snapshots", "vx_snapshots"],
//    "snapshot_stride": 10}
//
// Optional keys: "gauge" ("asymptotic" | "boundary_zero"), "absorber"
// {"fraction", "strength"}, "scf" {"mix", "tol", "max_iterations"},
// "interaction.strength", "record_stride". Unknown keys are rejected.

#include <string>

#include "tdlhf/tdlhf_grid.hpp"

namespace tdlhf::app {

struct RunConfig {
  grid::Grid1D grid;
  grid::Interaction interaction;
  int electrons = 2;
  grid::StaticPotential v0;
  grid::Drive drive;
  grid::GroundStateOptions scf;
  grid::PropagationOptions propagation;
  bool write_dipole = true;
  bool write_density = false;
  bool write_vx = false;

  // Throws DomainError on malformed or out-of-range input.
  static RunConfig parse(const std::string &json_text);
  // Throws IoError when the file cannot be read.
  static RunConfig load(const std::string &path);

  // Normalized JSON with every default filled in, one line.
  std::string canonical() const;
};

} // namespace tdlhf::app
