#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmes/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::size_t> n_side;
  std::optional<double> c;
  std::vector<std::size_t> steps;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON config file (defaults to the baseline)")->check(CLI::ExistingFile);
  cmd->add_option("--nside", o.n_side, "nodes per side of the mesh");
  cmd->add_option("--c", o.c, "reaction coefficient");
  cmd->add_option("--steps", o.steps, "time step count; repeat to run several")->allow_extra_args(false);
  cmd->add_option("--out", o.out, "output directory");
}

fmes::ExperimentConfig resolve(const Options& o) {
  fmes::ExperimentConfig config = o.config.empty() ? fmes::ExperimentConfig::baseline() : fmes::load_config(o.config);
  if (o.n_side) {
    config.n_side = *o.n_side;
    config.table_grids = {*o.n_side};
  }
  if (o.c) config.coeffs.c = *o.c;
  if (!o.steps.empty()) {
    for (auto& entry : config.schemes) entry.steps = o.steps;
  }
  if (!o.out.empty()) config.output_dir = o.out;
  if (const char* env = std::getenv(fmes::output_dir_env); env != nullptr && *env != '\0') config.output_dir = env;
  config.validate();
  return config;
}

int eigens(const Options& o) {
  const fmes::ExperimentConfig config = resolve(o);
  const fmes::Table1 table = fmes::run_table1(config);
  const auto path = config.output_dir / "table1.csv";
  fmes::write_table1(table, path);
  std::printf("%4s", "m");
  for (std::size_t g : table.grids) std::printf("  %15s", ("N" + std::to_string(g)).c_str());
  std::printf("\n");
  for (std::size_t m = 0; m < config.table_iterations; ++m) {
    std::printf("%4zu", m + 1);
    for (const auto& column : table.estimates) std::printf("  %15.11f", column[m]);
    std::printf("\n");
  }
  for (std::size_t g = 0; g < table.grids.size(); ++g) {
    std::printf("N%zu: lambda1_bar = %.11f after %zu iterations, residual %.2e, %.2f s\n", table.grids[g],
                table.pairs[g].lambda1_bar, table.pairs[g].iterations, table.pairs[g].residual, table.seconds[g]);
  }
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int run(const Options& o) {
  const fmes::ExperimentConfig config = resolve(o);
  const fmes::ExperimentReport report = fmes::run_experiment(config, config.output_dir);
  std::printf("lambda1 = %.11f (n_side %zu, c %g)\n", report.pair.lambda1, config.n_side, config.coeffs.c);
  for (const auto& r : report.runs) {
    if (r.ok) {
      std::printf("%-15s %-6s N=%-5zu max|eps_a|=%.3e max eps_u=%.3e  %.2f s\n", fmes::to_string(r.spec.kind).c_str(),
                  r.spec.parameter_label().c_str(), r.spec.n_steps, r.max_abs_eps_a(), r.max_eps_u(), r.wall_seconds);
    } else {
      std::printf("%-15s %-6s N=%-5zu FAILED: %s\n", fmes::to_string(r.spec.kind).c_str(),
                  r.spec.parameter_label().c_str(), r.spec.n_steps, r.error.c_str());
    }
  }
  std::printf("wrote %s\n", config.output_dir.string().c_str());
  return report.all_ok() ? 0 : 1;
}

int analyze(const Options& o) {
  const fmes::ExperimentConfig config = resolve(o);
  fmes::write_analysis(config.output_dir);
  std::printf("wrote %s\n", config.output_dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fundamental mode exact schemes for the heat equation"};
  app.require_subcommand(1);
  Options opts;
  CLI::App* eigens_cmd = app.add_subcommand("eigens", "inverse iteration estimates on the table grids");
  CLI::App* run_cmd = app.add_subcommand("run", "time-stepping experiment");
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "scalar multiplier tables");
  for (CLI::App* cmd : {eigens_cmd, run_cmd, analyze_cmd}) add_common(cmd, opts);

  CLI11_PARSE(app, argc, argv);
  try {
    if (eigens_cmd->parsed()) return eigens(opts);
    if (run_cmd->parsed()) return run(opts);
    return analyze(opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
