#include "tdlhf/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tdlhf/errors.hpp"

namespace tdlhf::app {

namespace {

using nlohmann::json;

void only_keys(const json &j, const std::set<std::string> &allowed,
               const std::string &where) {
  if (!j.is_object())
    throw DomainError("config: " + where + " must be an object");
  for (const auto &item : j.items())
    if (!allowed.count(item.key()))
      throw DomainError("config: unknown key '" + item.key() + "' in " + where);
}

template <class T>
T get_or(const json &j, const char *key, T fallback) {
  if (!j.contains(key))
    return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    throw DomainError(std::string("config: bad value for '") + key + "'");
  }
}

template <class T> T require(const json &j, const char *key) {
  if (!j.contains(key))
    throw DomainError(std::string("config: missing '") + key + "'");
  return get_or<T>(j, key, T{});
}

grid::StaticPotential::Shape shape_from(const std::string &s) {
  if (s == "soft_well")
    return grid::StaticPotential::Shape::soft_well;
  if (s == "harmonic")
    return grid::StaticPotential::Shape::harmonic;
  if (s == "double_well")
    return grid::StaticPotential::Shape::double_well;
  throw DomainError("config: unknown v0 shape '" + s + "'");
}

const char *shape_name(grid::StaticPotential::Shape s) {
  switch (s) {
  case grid::StaticPotential::Shape::soft_well:
    return "soft_well";
  case grid::StaticPotential::Shape::harmonic:
    return "harmonic";
  case grid::StaticPotential::Shape::double_well:
    return "double_well";
  }
  return "?";
}

grid::Drive::Envelope envelope_from(const std::string &s) {
  using E = grid::Drive::Envelope;
  if (s == "none")
    return E::none;
  if (s == "kick")
    return E::kick;
  if (s == "constant")
    return E::constant;
  if (s == "sin2")
    return E::sin2;
  if (s == "gaussian")
    return E::gaussian;
  throw DomainError("config: unknown drive envelope '" + s + "'");
}

const char *envelope_name(grid::Drive::Envelope e) {
  using E = grid::Drive::Envelope;
  switch (e) {
  case E::none:
    return "none";
  case E::kick:
    return "kick";
  case E::constant:
    return "constant";
  case E::sin2:
    return "sin2";
  case E::gaussian:
    return "gaussian";
  }
  return "?";
}

} // namespace

RunConfig RunConfig::parse(const std::string &json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw DomainError(std::string("config: invalid JSON: ") + e.what());
  }
  only_keys(j,
            {"grid", "interaction", "electrons", "v0", "drive", "dt", "n_steps",
             "scheme", "outputs", "snapshot_stride", "record_stride", "gauge",
             "absorber", "scf"},
            "top level");
  RunConfig c;

  const json &g = j.contains("grid") ? j.at("grid") : throw DomainError("config: missing 'grid'");
  only_keys(g, {"x_min", "x_max", "n_points"}, "grid");
  c.grid = grid::Grid1D::make(require<double>(g, "x_min"), require<double>(g, "x_max"),
                              require<int>(g, "n_points"));

  if (j.contains("interaction")) {
    const json &w = j.at("interaction");
    only_keys(w, {"softening", "strength"}, "interaction");
    c.interaction.softening = get_or(w, "softening", 1.0);
    c.interaction.strength = get_or(w, "strength", 1.0);
    if (!(c.interaction.softening > 0.0))
      throw DomainError("config: interaction.softening must be positive");
  }

  c.electrons = require<int>(j, "electrons");
  grid::closed_shell_occupations(c.electrons); // validates N

  if (j.contains("v0")) {
    const json &v = j.at("v0");
    only_keys(v, {"shape", "depth", "softening", "center", "separation", "omega"}, "v0");
    c.v0.shape = shape_from(get_or<std::string>(v, "shape", "soft_well"));
    c.v0.depth = get_or(v, "depth", c.v0.depth);
    c.v0.softening = get_or(v, "softening", c.v0.softening);
    c.v0.center = get_or(v, "center", c.v0.center);
    c.v0.separation = get_or(v, "separation", c.v0.separation);
    c.v0.omega = get_or(v, "omega", c.v0.omega);
  }

  if (j.contains("drive")) {
    const json &d = j.at("drive");
    only_keys(d, {"envelope", "E0", "omega", "duration", "t0", "width"}, "drive");
    c.drive.envelope = envelope_from(get_or<std::string>(d, "envelope", "none"));
    c.drive.E0 = get_or(d, "E0", 0.0);
    c.drive.omega = get_or(d, "omega", 0.0);
    c.drive.duration = get_or(d, "duration", 0.0);
    c.drive.t0 = get_or(d, "t0", 0.0);
    c.drive.width = get_or(d, "width", 1.0);
    if (c.drive.envelope == grid::Drive::Envelope::sin2 && !(c.drive.duration > 0.0))
      throw DomainError("config: sin2 drive needs duration > 0");
    if (c.drive.envelope == grid::Drive::Envelope::gaussian && !(c.drive.width > 0.0))
      throw DomainError("config: gaussian drive needs width > 0");
  }

  auto &pr = c.propagation;
  pr.dt = get_or(j, "dt", pr.dt);
  pr.n_steps = get_or(j, "n_steps", pr.n_steps);
  pr.snapshot_stride = get_or(j, "snapshot_stride", 0);
  pr.record_stride = get_or(j, "record_stride", 1);
  if (!(pr.dt > 0.0) || pr.n_steps < 0 || pr.snapshot_stride < 0 || pr.record_stride < 1)
    throw DomainError("config: need dt > 0, n_steps >= 0, strides >= 0 / >= 1");
  const auto scheme = get_or<std::string>(j, "scheme", "cn");
  if (scheme == "cn")
    pr.scheme = grid::PropagationOptions::Scheme::cn;
  else if (scheme == "euler")
    pr.scheme = grid::PropagationOptions::Scheme::euler;
  else
    throw DomainError("config: scheme must be \"cn\" or \"euler\"");

  if (j.contains("outputs")) {
    c.write_dipole = false;
    std::vector<std::string> outs;
    try {
      outs = j.at("outputs").get<std::vector<std::string>>();
    } catch (const json::exception &) {
      throw DomainError("config: outputs must be a list of strings");
    }
    for (const auto &o : outs) {
      if (o == "dipole")
        c.write_dipole = true;
      else if (o == "density_snapshots")
        c.write_density = true;
      else if (o == "vx_snapshots")
        c.write_vx = true;
      else
        throw DomainError("config: unknown output '" + o + "'");
    }
  }
  if ((c.write_density || c.write_vx) && pr.snapshot_stride == 0)
    pr.snapshot_stride = 1;

  const auto gauge = get_or<std::string>(j, "gauge", "asymptotic");
  if (gauge == "asymptotic")
    pr.solve.gauge.kind = grid::GaugeRule::Kind::asymptotic;
  else if (gauge == "boundary_zero")
    pr.solve.gauge.kind = grid::GaugeRule::Kind::boundary_zero;
  else
    throw DomainError("config: gauge must be \"asymptotic\" or \"boundary_zero\"");

  if (j.contains("absorber")) {
    const json &a = j.at("absorber");
    only_keys(a, {"fraction", "strength"}, "absorber");
    pr.mask_fraction = get_or(a, "fraction", 0.1);
    pr.mask_strength = get_or(a, "strength", 0.0);
    if (!(pr.mask_fraction > 0.0 && pr.mask_fraction < 0.5) ||
        !(pr.mask_strength >= 0.0 && pr.mask_strength <= 1.0))
      throw DomainError("config: absorber needs fraction in (0, 0.5), strength in [0, 1]");
  }

  if (j.contains("scf")) {
    const json &s = j.at("scf");
    only_keys(s, {"mix", "tol", "max_iterations"}, "scf");
    c.scf.mix = get_or(s, "mix", c.scf.mix);
    c.scf.tol = get_or(s, "tol", c.scf.tol);
    c.scf.max_iterations = get_or(s, "max_iterations", c.scf.max_iterations);
  }
  c.scf.solve.gauge = pr.solve.gauge;
  return c;
}

RunConfig RunConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::canonical() const {
  json j;
  j["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n_points", grid.n_points}};
  j["interaction"] = {{"softening", interaction.softening},
                      {"strength", interaction.strength}};
  j["electrons"] = electrons;
  j["v0"] = {{"shape", shape_name(v0.shape)}, {"depth", v0.depth},
             {"softening", v0.softening}, {"center", v0.center},
             {"separation", v0.separation}, {"omega", v0.omega}};
  j["drive"] = {{"envelope", envelope_name(drive.envelope)}, {"E0", drive.E0},
                {"omega", drive.omega}, {"duration", drive.duration},
                {"t0", drive.t0}, {"width", drive.width}};
  j["dt"] = propagation.dt;
  j["n_steps"] = propagation.n_steps;
  j["scheme"] =
      propagation.scheme == grid::PropagationOptions::Scheme::cn ? "cn" : "euler";
  json outs = json::array();
  if (write_dipole)
    outs.push_back("dipole");
  if (write_density)
    outs.push_back("density_snapshots");
  if (write_vx)
    outs.push_back("vx_snapshots");
  j["outputs"] = outs;
  j["snapshot_stride"] = propagation.snapshot_stride;
  j["record_stride"] = propagation.record_stride;
  j["gauge"] = propagation.solve.gauge.kind == grid::GaugeRule::Kind::asymptotic
                   ? "asymptotic"
                   : "boundary_zero";
  j["absorber"] = {{"fraction", propagation.mask_fraction},
                   {"strength", propagation.mask_strength}};
  j["scf"] = {{"mix", scf.mix}, {"tol", scf.tol}, {"max_iterations", scf.max_iterations}};
  return j.dump();
}

} // namespace tdlhf::app
