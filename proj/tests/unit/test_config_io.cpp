#include <doctest.h>
#include <cmath>
#include "helpers.hpp"
#include "rsoc/errors.hpp"
#include "rsoc/hjb_discounted.hpp"
#include "rsoc/io.hpp"
#include "rsoc/reflected_sde.hpp"

using namespace rsoc;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults describe the canonical 1-D model") {
  const RunConfig c = parse_config("");
  const ModelSpec& m = c.model;
  CHECK(m.domain.dim == 1);
  CHECK(m.domain.box_side == 8.0);
  CHECK(m.actions.size() == 2);
  CHECK(m.coeffs.drift(Vec{1.0}, 0)[0] == -1.0);
  CHECK(m.coeffs.drift(Vec{1.0}, 1)[0] == 1.0);
  CHECK(m.coeffs.cost(Vec{3.0}, 0) == 2.0);
  CHECK(m.theta == 1.0);
  CHECK(m.x0[0] == 2.0);
  CHECK(c.numerics.alphas.size() == 5);
}

TEST_CASE("config errors name the key and the constraint") {
  CHECK(error_of("[model]\nkappa = 2\n").find("kappa < theta violated") != std::string::npos);
  CHECK(error_of("[model]\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("[nonsense]\na = 1\n").find("nonsense") != std::string::npos);
  CHECK(error_of("[model]\nstep = 0.3\n").find("step") != std::string::npos);
  CHECK(error_of("[model]\nalpha = -1\n").find("alpha") != std::string::npos);
  CHECK(error_of("[model]\ndrift = -1; 1\nactions = one\n").find("actions") != std::string::npos);
  CHECK(error_of("[run]\nseed = -4\n").find("seed") != std::string::npos);
  CHECK(error_of("[run]\npolicy = constant\npolicy_weights = 0.6, 0.6\n").find("policy_weights") != std::string::npos);
  CHECK(error_of("[model\n").find(":1") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/x.ini"), ValidationError);
}

TEST_CASE("commands parse and print") {
  for (const char* name : {"simulate", "solve-discounted", "solve-ergodic", "probe-recurrence", "verify", "suite"})
    CHECK(std::string(to_string(parse_command(name))) == name);
  CHECK_THROWS_AS(parse_command("fly"), ValidationError);
}

TEST_CASE("value field CSV round trips bit for bit") {
  const ValueField f = solve_discounted(testing::canonical_1d(0.25));
  const ValueField g = io::read_value_field_csv(io::value_field_csv(f));
  CHECK(g.alpha == f.alpha);
  CHECK(g.kappa == f.kappa);
  CHECK(g.cost_sup == f.cost_sup);
  CHECK(g.x0_index == f.x0_index);
  REQUIRE(g.size() == f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(g.slices[k].theta == f.slices[k].theta);
    CHECK(g.slices[k].log_scale == f.slices[k].log_scale);
    CHECK(g.slices[k].w == f.slices[k].w);
  }
  CHECK(io::value_field_csv(g) == io::value_field_csv(f));
}

TEST_CASE("paths CSV has one block per path") {
  const ModelSpec m = testing::canonical_1d();
  const auto paths = simulate_batch(m, ControlPolicy::constant({0.5, 0.5}), Vec{1.0}, 0.05, 0.01, 3, 1);
  const std::string csv = io::paths_csv(paths);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 3 * 6);
}

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23}) CHECK(std::stod(io::fmt(v)) == v);
}

TEST_CASE("summary and error json") {
  const io::json s = io::summary(Command::verify, "pass", {{"max_z", 1.0}}, {"w"});
  CHECK(s["schema"] == "rsoc.summary");
  CHECK(s["schema_version"] == io::kSchemaVersion);
  CHECK(s["command"] == "verify");
  CHECK(s["warnings"].size() == 1);
  const io::json e = io::error_json("config", "bad", 1);
  CHECK(e["exit_code"] == 1);
}
