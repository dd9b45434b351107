#include <doctest.h>
#include <filesystem>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <json.hpp>
#include "rsoc/app.hpp"

using namespace rsoc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rsoc_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "in.ini";
  std::ofstream(p) << text;
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validation errors exit 1 with error.json") {
  const fs::path dir = scratch("bad");
  const fs::path cfg = write_config(dir, "[model]\nkappa = 3\n");
  std::ostringstream log;
  CHECK(run_cli(Command::solve_discounted, cfg, dir / "out", std::nullopt, log) == kValidation);
  const auto e = read_json(dir / "out" / "error.json");
  CHECK(e["exit_code"] == 1);
  CHECK(e["message"].get<std::string>().find("kappa") != std::string::npos);
  CHECK(run_cli(Command::simulate, dir / "missing.ini", dir / "out2", std::nullopt, log) == kValidation);
}

TEST_CASE("dtheta beyond the monotone bound exits 1") {
  const fs::path dir = scratch("dtheta");
  const fs::path cfg = write_config(dir, "[numerics]\ndtheta = 0.5\n");
  std::ostringstream log;
  CHECK(run_cli(Command::solve_discounted, cfg, dir / "out", std::nullopt, log) == kValidation);
}

TEST_CASE("simulate writes one path id per path and is seed-reproducible") {
  const fs::path dir = scratch("sim");
  const fs::path cfg = write_config(dir, "[numerics]\nn_paths = 100\nhorizon = 0.2\n[run]\npolicy = constant\npolicy_weights = 0.5, 0.5\n");
  std::ostringstream log;
  REQUIRE(run_cli(Command::simulate, cfg, dir / "a", 5, log) == kOk);
  REQUIRE(run_cli(Command::simulate, cfg, dir / "b", 5, log) == kOk);
  const std::string a = read_text(dir / "a" / "paths.csv");
  CHECK(a == read_text(dir / "b" / "paths.csv"));
  std::set<std::string> ids;
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) ids.insert(line.substr(0, line.find(',')));
  CHECK(ids.size() == 100);
  const auto s = read_json(dir / "a" / "summary.json");
  CHECK(s["command"] == "simulate");
  CHECK(s["status"] == "ok");
  const auto m = read_json(dir / "a" / "manifest.json");
  CHECK(m["seed"] == 5);
  CHECK(fs::exists(dir / "a" / "config.ini"));
}

TEST_CASE("solve-ergodic on constant cost reports rho = c") {
  const fs::path dir = scratch("erg");
  const fs::path cfg = write_config(dir,
                                    "[model]\nbox_side = 4\nstep = 0.125\ncost = constant\ncost_value = 0.75\n"
                                    "[numerics]\nalphas = 1, 0.5, 0.25\n");
  std::ostringstream log;
  REQUIRE(run_cli(Command::solve_ergodic, cfg, dir / "out", std::nullopt, log) == kOk);
  const auto s = read_json(dir / "out" / "summary.json");
  CHECK(s["results"]["rho"].get<double>() == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(fs::exists(dir / "out" / "u_hat.csv"));
  CHECK(fs::exists(dir / "out" / "rho_table.csv"));
}

TEST_CASE("verify on reflected BM passes") {
  const fs::path dir = scratch("verify");
  const fs::path cfg = write_config(dir,
                                    "[model]\nactions = a\ndrift = 0\ncost = constant\ncost_value = 0\nstep = 0.125\n"
                                    "[numerics]\nn_paths = 2000\ndt = 0.001\nergodic_horizons = 5, 10, 20\nergodic_paths = 200\n"
                                    "alphas = 1, 0.5\n");
  std::ostringstream log;
  CHECK(run_cli(Command::verify, cfg, dir / "v", 3, log) == kOk);
  CHECK(read_json(dir / "v" / "summary.json")["status"] == "pass");
}

TEST_CASE("suite fails at the reflection angle for a tangential gamma") {
  const fs::path dir = scratch("tangential");
  const fs::path cfg = write_config(dir,
                                    "[model]\ndim = 2\nbox_side = 4\nstep = 0.5\ndrift = -1 -1; 1 1\n"
                                    "gamma = constant\ngamma_dir = 0 1\n");
  std::ostringstream log;
  CHECK(run_cli(Command::suite, cfg, dir / "out", std::nullopt, log) == kVerificationFail);
  const auto v = read_json(dir / "out" / "verdict.json");
  bool found = false;
  for (const auto& c : v["checks"])
    if (c["name"] == "check_reflection_angle") {
      found = true;
      CHECK(c["pass"] == false);
    }
  CHECK(found);
  CHECK(v["checks"].back()["name"] == "check_reflection_angle");
}

TEST_CASE("suite on zero cost passes with rho = 0 and identical summary bytes") {
  const fs::path dir = scratch("zero");
  const fs::path cfg = write_config(dir,
                                    "[model]\nstep = 0.125\ncost = constant\ncost_value = 0\n"
                                    "[numerics]\nn_paths = 300\nergodic_horizons = 5, 10, 20\nergodic_paths = 100\n"
                                    "alphas = 1, 0.5, 0.25\n");
  std::ostringstream log;
  REQUIRE(run_cli(Command::suite, cfg, dir / "a", 11, log) == kOk);
  REQUIRE(run_cli(Command::suite, cfg, dir / "b", 11, log) == kOk);
  const auto v = read_json(dir / "a" / "verdict.json");
  CHECK(v["rho"].get<double>() == 0.0);
  CHECK(read_text(dir / "a" / "summary.json") == read_text(dir / "b" / "summary.json"));
}

TEST_CASE("policy CSV has one row per node") {
  const fs::path dir = scratch("policy");
  const fs::path cfg = write_config(dir, "[model]\nstep = 0.25\n");
  std::ostringstream log;
  REQUIRE(run_cli(Command::solve_discounted, cfg, dir / "out", std::nullopt, log) == kOk);
  std::istringstream in(read_text(dir / "out" / "policy.csv"));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && std::isdigit(static_cast<unsigned char>(line[0]))) ++rows;
  CHECK(rows == 33);
}
