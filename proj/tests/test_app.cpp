#include <cmath>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "tdlhf/errors.hpp"
#include "tdlhf/run_config.hpp"
#include "tdlhf/sweep.hpp"

using namespace tdlhf;
using namespace tdlhf::app;
using doctest::Approx;

namespace {
const char *kConfig = R"({
  "grid": {"x_min": -10, "x_max": 10, "n_points": 100},
  "electrons": 2,
  "v0": {"shape": "double_well", "depth": 1.5, "separation": 3.0},
  "drive": {"envelope": "sin2", "E0": 0.02, "omega": 0.5, "duration": 20},
  "dt": 0.05,
  "n_steps": 10,
  "scheme": "euler",
  "outputs": ["dipole", "vx_snapshots"],
  "gauge": "boundary_zero",
  "absorber": {"fraction": 0.1, "strength": 0.5},
  "scf": {"mix": 0.5}
})";
}

TEST_CASE("run configuration") {
  const auto c = RunConfig::parse(kConfig);
  CHECK(c.grid.n_points == 100);
  CHECK(c.electrons == 2);
  CHECK(c.v0.shape == grid::StaticPotential::Shape::double_well);
  CHECK(c.v0.separation == 3.0);
  CHECK(c.drive.envelope == grid::Drive::Envelope::sin2);
  CHECK(c.propagation.scheme == grid::PropagationOptions::Scheme::euler);
  CHECK(c.propagation.snapshot_stride == 1);
  CHECK(c.write_dipole);
  CHECK(c.write_vx);
  CHECK_FALSE(c.write_density);
  CHECK(c.propagation.solve.gauge.kind == grid::GaugeRule::Kind::boundary_zero);
  CHECK(c.scf.solve.gauge.kind == grid::GaugeRule::Kind::boundary_zero);
  CHECK(c.propagation.mask_strength == 0.5);
  CHECK(c.scf.mix == 0.5);
  // canonical form parses back to the same form
  CHECK(RunConfig::parse(c.canonical()).canonical() == c.canonical());

  auto bad = [](const std::string &patch) {
    auto j = nlohmann::json::parse(kConfig);
    j.merge_patch(nlohmann::json::parse(patch));
    return j.dump();
  };
  CHECK_THROWS_AS(RunConfig::parse("{"), DomainError);
  CHECK_THROWS_AS(RunConfig::parse(bad(R"({"typo": 1})")), DomainError);
  CHECK_THROWS_AS(RunConfig::parse(bad(R"({"electrons": 3})")), DomainError);
  CHECK_THROWS_AS(RunConfig::parse(bad(R"({"scheme": "rk4"})")), DomainError);
  CHECK_THROWS_AS(RunConfig::parse(bad(R"({"dt": -1})")), DomainError);
  CHECK_THROWS_AS(RunConfig::parse(bad(R"({"grid": {"n_points": 4}})")), DomainError);
  CHECK_THROWS_AS(RunConfig::parse(bad(R"({"outputs": ["movie"]})")), DomainError);
  CHECK_THROWS_AS(RunConfig::parse(bad(R"({"v0": {"shape": "box"}})")), DomainError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), IoError);
}

TEST_CASE("table rendering") {
  Table t;
  t.metadata = {{"a", "1"}};
  t.columns = {"x", "y"};
  t.rows = {{1.0, 0.5}, {2.0, NAN}};
  CHECK(t.render(Format::csv) ==
        "# a: 1\nx,y\n1.000000000000e+00,5.000000000000e-01\n2.000000000000e+00,nan\n");
  const auto j = nlohmann::json::parse(t.render(Format::json));
  CHECK(j["metadata"]["a"] == "1");
  CHECK(j["columns"][1] == "y");
  CHECK(j["rows"][1][1].is_null());
  CHECK(parse_format("json") == Format::json);
  CHECK_THROWS_AS(parse_format("xml"), DomainError);
}

TEST_CASE("sweeps and tables") {
  SweepRequest req;
  req.count = 2;
  req.omega_max = 1.0;
  req.eta_over_epsF = 1e-2;
  const auto pts = compute_sweep(req);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].omega_over_epsF == 1.0);
  const auto fx = fx_table(req, pts);
  CHECK((fx.columns == std::vector<std::string>{"omega_over_epsF", "re_fx_au", "im_fx_au"}));
  CHECK(fx.rows.size() == 2);
  const auto eps = eps_table(req, pts);
  CHECK(eps.columns.size() == 5);
  bool has_regen = false;
  for (const auto &[k, v] : fx.metadata)
    has_regen = has_regen || (k == "regenerate" && v.find("--omega-count 2") != std::string::npos);
  CHECK(has_regen);

  req.q_over_kF = 1e-4;
  CHECK_THROWS_AS(compute_sweep(req), DomainError);
  req = {};
  req.count = 1;
  CHECK_THROWS_AS(req.validate(), DomainError);

  const auto mux = mux_table({1.0, 5.0});
  CHECK((mux.columns == std::vector<std::string>{"r_s", "mu_au", "mu_over_2wpln"}));
  CHECK(std::abs(mux.rows[1][2] - 0.02464537) < 5e-8);
  CHECK_THROWS_AS(mux_table({}), DomainError);

  StaticRequest st;
  st.count = 3;
  st.q_min = 0.5;
  st.q_max = 1.5;
  const auto s = static_fx_table(st);
  CHECK(s.rows.size() == 3);
  CHECK(s.rows[2][0] == 1.5);
  CHECK(s.rows[0][1] < 0.0);
}
