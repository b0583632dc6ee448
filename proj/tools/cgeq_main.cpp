#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cgeq/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int n_max = 0;
  int k_max = 0;
  std::string cases_text;
  std::string direction_text;
  int threads = 0;
  std::int64_t dim_cap = 0;
  bool seedless = false;

  CLI::Option* config_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* n_max_opt = nullptr;
  CLI::Option* k_max_opt = nullptr;
  CLI::Option* case_opt = nullptr;
  CLI::Option* direction_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* dim_cap_opt = nullptr;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  args.config_opt = sub->add_option("--config", args.config_path, "JSON config file");
  args.out_opt = sub->add_option("--out", args.out_dir, "output directory for CSV files");
  args.n_max_opt = sub->add_option("--n-max", args.n_max, "largest chain length");
  args.k_max_opt = sub->add_option("--k-max", args.k_max, "largest flip count");
  args.case_opt = sub->add_option("--case", args.cases_text, "flip case: a, b, or both");
  args.direction_opt =
      sub->add_option("--direction", args.direction_text,
                      "preparation direction: z, x, y, or angles:<theta_deg>,<phi_deg>");
  args.threads_opt = sub->add_option("--threads", args.threads, "worker threads");
  args.dim_cap_opt =
      sub->add_option("--dim-cap", args.dim_cap, "largest Hilbert dimension to attempt");
  sub->add_flag("--seedless", args.seedless,
                "assert the run uses no randomness (always true; accepted for tooling)");
}

cgeq::ConfigResult resolve_config(const CommonArgs& args) {
  cgeq::ConfigResult result;
  if (args.config_opt->count() > 0) result = cgeq::load_config_file(args.config_path);

  cgeq::ConfigOverrides overrides;
  if (args.n_max_opt->count() > 0) overrides.n_max = args.n_max;
  if (args.k_max_opt->count() > 0) overrides.k_max = args.k_max;
  if (args.case_opt->count() > 0) overrides.cases = args.cases_text;
  if (args.direction_opt->count() > 0) overrides.direction = args.direction_text;
  if (args.out_opt->count() > 0) overrides.out_dir = args.out_dir;
  if (args.threads_opt->count() > 0) overrides.threads = args.threads;
  if (args.dim_cap_opt->count() > 0) overrides.dim_cap = cgeq::Index{args.dim_cap};
  cgeq::apply_overrides(result, overrides);
  return result;
}

int report_errors(const cgeq::ConfigResult& result) {
  for (const auto& error : result.errors)
    std::cerr << "error: " << error.field << ": " << error.message << "\n";
  return 1;
}

template <typename Action>
int run_command(const CommonArgs& args, Action&& action) {
  const auto result = resolve_config(args);
  if (!result.ok()) return report_errors(result);
  for (const auto& warning : result.warnings)
    std::cerr << "warning: " << warning.field << ": " << warning.message << "\n";
  try {
    cgeq::SpectrumStore store(result.config.dim_cap);
    return action(result.config, store);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "coarse-grained equilibration study of an open XYZ spin-1/2 chain with "
      "next-nearest-neighbor zz coupling"};
  app.require_subcommand(1);

  CommonArgs deff_args, ldos_args, evolve_args, teq_args, validate_args;
  auto* deff = app.add_subcommand(
      "deff-sweep", "effective-dimension scaling of coarse-grained states across chain lengths");
  add_common(deff, deff_args);
  auto* ldos_cmd = app.add_subcommand(
      "ldos", "energy distribution of a single initial state plus the level histogram");
  add_common(ldos_cmd, ldos_args);
  auto* evolve =
      app.add_subcommand("evolve", "time signal g(t) for every sweep point, one CSV each");
  add_common(evolve, evolve_args);
  auto* teq =
      app.add_subcommand("teq", "equilibration and first-decay time scales per sweep point");
  add_common(teq, teq_args);
  auto* validate =
      app.add_subcommand("validate", "parse, merge, and report the effective configuration");
  add_common(validate, validate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (validate->parsed()) {
    const auto result = resolve_config(validate_args);
    if (!result.ok()) return report_errors(result);
    return cgeq::run_validate(result, std::cout);
  }
  if (deff->parsed())
    return run_command(deff_args, [](const cgeq::SweepConfig& config, cgeq::SpectrumStore& store) {
      return cgeq::run_deff_sweep(config, store, std::cerr);
    });
  if (ldos_cmd->parsed())
    return run_command(ldos_args, [](const cgeq::SweepConfig& config, cgeq::SpectrumStore& store) {
      return cgeq::run_ldos(config, store, std::cerr);
    });
  if (evolve->parsed())
    return run_command(evolve_args, [](const cgeq::SweepConfig& config, cgeq::SpectrumStore& store) {
      return cgeq::run_evolution(config, store, std::cerr);
    });
  if (teq->parsed())
    return run_command(teq_args, [](const cgeq::SweepConfig& config, cgeq::SpectrumStore& store) {
      return cgeq::run_teq(config, store, std::cerr);
    });
  return 1;
}
