#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "neelgap/cli.hpp"

using namespace neelgap;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("neelgap-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

int exit_code_of(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(json::object());
  CHECK(c.lattices.size() == 3);
  CHECK_THROWS_AS(parse_config(json{{"nonsense", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"epsilon_list", {0.7}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"beta_list", {-1.0}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"scenarios", {"no-such"}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"lattices", {{{"d", 1}, {"L", 1}, {"S", 0.3}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"R_list", "one"}}), ConfigError);
  const auto round = parse_config(to_json(c));
  CHECK(to_json(round) == to_json(c));
}

TEST_CASE("catalog") {
  const auto& cat = scenario_catalog();
  CHECK(cat.size() == 9);
  auto has = [&](const std::string& n) {
    return std::any_of(cat.begin(), cat.end(), [&](const ScenarioInfo& s) { return s.name == n; });
  };
  CHECK(has("kls"));
  CHECK(has("rp-energy"));
}

TEST_CASE("default configuration passes and is reproducible") {
  auto c = parse_config(json::object());
  c.output_dir = scratch("default").string();
  const auto a = run(c);
  CHECK(a.failed == 0);
  CHECK(a.passed > 0);
  CHECK(a.exit_code() == 0);
  c.threads = 3;
  const auto b = run(c);
  CHECK(report_json(a, c, false).dump() == report_json(b, c, false).dump());
  write_outputs(a, c);
  for (const char* f : {"report.json", "scaling.csv", "structure.csv"})
    CHECK(std::filesystem::exists(std::filesystem::path(c.output_dir) / f));
  std::ifstream in(std::filesystem::path(c.output_dir) / "report.json");
  const json rep = json::parse(in);
  CHECK(rep["schema_version"] == 1);
  CHECK(rep.contains("timestamp"));
}

TEST_CASE("R too large for the lattice is skipped, not failed") {
  auto c = parse_config(json{{"lattices", {{{"d", 1}, {"L", 2}, {"S", 0.5}}}},
                             {"R_list", {5}},
                             {"B_list", {0.5}},
                             {"scenarios", {"kls", "trial-state"}}});
  const auto s = run(c);
  CHECK(s.failed == 0);
  CHECK(s.skipped == 2);
  CHECK(s.results[0].reason.find("exceeds") != std::string::npos);
}

TEST_CASE("strict policy skips ramps that do not fit") {
  auto c = parse_config(json{{"lattices", {{{"d", 1}, {"L", 2}, {"S", 0.5}}}},
                             {"clip", false},
                             {"scenarios", {"kls"}}});
  const auto s = run(c);
  CHECK(s.skipped == static_cast<int>(s.results.size()));
}

TEST_CASE("capacity caps turn into skip records") {
  auto c = parse_config(json{{"lattices", {{{"d", 2}, {"L", 3}, {"S", 0.5}}}}, {"scenarios", {"kls"}}});
  const auto s = run(c);
  CHECK(s.failed == 0);
  CHECK(s.skipped == 1);
}

TEST_CASE("seeds depend on scenario and parameters") {
  const json p{{"B", 0.5}};
  CHECK(scenario_seed(1, "kls", p) == scenario_seed(1, "kls", p));
  CHECK(scenario_seed(1, "kls", p) != scenario_seed(1, "rp-energy", p));
  CHECK(scenario_seed(1, "kls", p) != scenario_seed(2, "kls", p));
}

TEST_CASE("executable exit codes") {
  const std::string exe = NEELGAP_EXE;
  const auto dir = scratch("exe");
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const json& j) {
    const auto p = dir / name;
    std::ofstream(p) << j.dump();
    return p.string();
  };
  const std::string quiet = " > /dev/null 2>&1";
  const auto good = write("good.json", json{{"lattices", {{{"d", 1}, {"L", 2}, {"S", 0.5}}}},
                                            {"scenarios", {"kls", "commutator-identity"}}});
  CHECK(exit_code_of(exe + " run --config " + good + " --out " + (dir / "a").string() + quiet) == 0);
  const auto defect = write("defect.json", json{{"lattices", {{{"d", 1}, {"L", 3}, {"S", 0.5}}}},
                                                {"inject_defect", true},
                                                {"scenarios", {"commutator-identity"}}});
  CHECK(exit_code_of(exe + " run --config " + defect + " --out " + (dir / "b").string() + quiet) == 2);
  const auto bad = write("bad.json", json{{"lattices", "nope"}});
  CHECK(exit_code_of(exe + " run --config " + bad + quiet) == 3);
  CHECK(exit_code_of(exe + " run --config " + (dir / "missing.json").string() + quiet) == 3);
  CHECK(exit_code_of(exe + " list" + quiet) == 0);
  CHECK(exit_code_of(exe + " dump-operator --L 1 --what hamiltonian" + quiet) == 0);
}
