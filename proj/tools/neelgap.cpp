#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "neelgap/cli.hpp"

using namespace neelgap;

namespace {

int do_run(const std::string& config_path, const std::string& out_flag, int threads_flag, long long seed_flag) {
  RunConfig config;
  try {
    config = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
    if (const char* env = std::getenv("NEELGAP_OUT")) config.output_dir = env;
    if (const char* env = std::getenv("NEELGAP_THREADS")) {
      try {
        config.threads = std::stoi(env);
      } catch (const std::exception&) {
        throw ConfigError("NEELGAP_THREADS is not an integer");
      }
    }
    if (!out_flag.empty()) config.output_dir = out_flag;
    if (threads_flag > 0) config.threads = threads_flag;
    if (seed_flag >= 0) config.seed = static_cast<std::uint64_t>(seed_flag);
    if (config.threads < 1) throw ConfigError("threads must be >= 1");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto summary = run(config);
  write_outputs(summary, config);
  for (const auto& r : summary.results) {
    std::cout << to_string(r.status) << "  " << r.scenario << "  " << r.params.dump();
    if (!r.reason.empty()) std::cout << "  (" << r.reason << ')';
    std::cout << '\n';
  }
  std::cout << summary.passed << " passed, " << summary.failed << " failed, " << summary.skipped << " skipped; "
            << "reports in " << config.output_dir << '\n';
  return summary.exit_code();
}

int do_list() {
  for (const auto& s : scenario_catalog()) {
    std::cout << s.name << "\n  anchor: " << s.anchor << "\n  parameters: " << s.parameters << '\n';
  }
  return 0;
}

int do_dump(int d, int L, double S, const std::string& what, double B, int R, const std::string& out_path) {
  try {
    const Lattice lattice = build_lattice(LatticeSpec{d, L, Spin::from_double(S)});
    const OperatorFactory factory(lattice);
    std::string text;
    if (what == "hamiltonian") {
      text = to_triplet_text(factory.hamiltonian(B));
    } else if (what == "order") {
      text = to_triplet_text(factory.order_parameter());
    } else if (what == "staggered-sy") {
      text = to_triplet_text(factory.staggered_sy(region(lattice, R, true)));
    } else if (what == "boundary-field") {
      text = to_triplet_text(factory.boundary_field(ramp_field(lattice, R, true).values).h1);
    } else if (what == "spectrum") {
      text = eigenvalues_csv(diagonalize_by_sector(factory, B));
    } else {
      std::cerr << "unknown operator '" << what << "'\n";
      return kExitConfig;
    }
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream(out_path) << text;
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-lattice checks of the Neel-order and gap inequalities"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  long long seed = -1;
  auto* run_cmd = app.add_subcommand("run", "run the selected scenarios and write report.json, scaling.csv, structure.csv");
  run_cmd->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "base seed")->check(CLI::NonNegativeNumber);

  auto* list_cmd = app.add_subcommand("list", "list the scenario catalog");

  int d = 1, L = 1, R = 1;
  double S = 0.5, B = 0.0;
  std::string what = "hamiltonian", dump_out;
  auto* dump_cmd = app.add_subcommand("dump-operator", "print an operator as 'row col re im' triplets");
  dump_cmd->add_option("--d", d, "dimension")->check(CLI::PositiveNumber);
  dump_cmd->add_option("--L", L, "half side length")->check(CLI::PositiveNumber);
  dump_cmd->add_option("--S", S, "spin magnitude");
  dump_cmd->add_option("--B", B, "staggered field");
  dump_cmd->add_option("--R", R, "region radius")->check(CLI::PositiveNumber);
  dump_cmd->add_option("--what", what, "hamiltonian | order | staggered-sy | boundary-field | spectrum");
  dump_cmd->add_option("--out", dump_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run_cmd) return do_run(config_path, out_dir, threads, seed);
  if (*list_cmd) return do_list();
  if (*dump_cmd) return do_dump(d, L, S, what, B, R, dump_out);
  return kExitConfig;
}
