#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aprox/errors.hpp"
#include "aprox/harness/config.hpp"
#include "aprox/harness/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string suite = "all";
  double l_scale = 1.0;
};

aprox::ExperimentConfig resolve(const Flags& f) {
  aprox::ExperimentConfig cfg = f.config.empty() ? aprox::ExperimentConfig{} : aprox::load_config(f.config);
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.seed) cfg.seed = *f.seed;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "INI-style experiment config (see `aprox help-config`)");
  cmd->add_option("--out", f.out, "output directory (overrides [output] dir)");
  cmd->add_option("--seed", f.seed, "data seed (overrides [problem] seed)");
  cmd->add_option("--workers", f.workers, "worker threads, 0 = hardware concurrency");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic proximal gradient solver and experiment harness"};
  app.require_subcommand(1);
  Flags flags;

  auto* solve = app.add_subcommand("solve", "run the configured solver mode once");
  auto* bench = app.add_subcommand("bench", "warm-start linesearch grid over alpha x lambda_init");
  auto* compare = app.add_subcommand("compare", "run the comparison set and write plot data");
  auto* check = app.add_subcommand("check", "run invariant suites; exit code 1 on failure");
  auto* gen = app.add_subcommand("gen", "write the configured synthetic data set");
  auto* help_config = app.add_subcommand("help-config", "list every config key");
  for (auto* cmd : {solve, bench, compare, gen}) add_common(cmd, flags);
  check->add_option("--suite", flags.suite, "all, legendre, bregman, moreau, descent, sinkhorn, sufficient-decrease");
  check->add_option("--workers", flags.workers, "worker threads for the descent sampler");
  check->add_option("--l-scale", flags.l_scale, "multiply declared smoothness constants (testing)")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (help_config->parsed()) {
      std::cout << aprox::config_reference();
      return 0;
    }
    if (check->parsed()) {
      const auto results = aprox::check_suites(flags.suite, {flags.l_scale, flags.workers});
      aprox::print_suite_table(std::cout, results);
      for (const auto& r : results)
        if (!r.passed) return 1;
      return 0;
    }
    const aprox::ExperimentConfig cfg = resolve(flags);
    if (solve->parsed()) {
      const auto summary = aprox::run_solve(cfg, flags.workers);
      std::cout << summary.dump(2) << '\n';
      return summary.value("status", "") == "not_run" ? 1 : 0;
    }
    if (bench->parsed()) {
      std::cout << aprox::run_grid(cfg, flags.workers)["best"].dump(2) << '\n';
      return 0;
    }
    if (compare->parsed()) {
      const auto summary = aprox::run_experiment(cfg, flags.workers);
      std::cout << summary["runs"].dump(2) << '\n';
      return 0;
    }
    std::cout << aprox::run_generate(cfg) << '\n';
    return 0;
  } catch (const aprox::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
