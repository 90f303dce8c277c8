#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ioprobe/csv.hpp"
#include "ioprobe/error.hpp"
#include "ioprobe_cli/config.hpp"
#include "ioprobe_cli/experiment.hpp"

namespace {

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ioprobe::cli;

  CLI::App app{"ioprobe: black-box estimation of gain, passivity and cone bounds"};
  app.require_subcommand(1);

  std::string out_dir;
  std::uint64_t seed = 0;
  std::string path;

  auto* run = app.add_subcommand("run", "estimate the configured properties");
  run->add_option("config", path, "experiment config")->required();
  auto* cmp = app.add_subcommand("compare", "accuracy per method and sample budget");
  cmp->add_option("config", path, "experiment config with a [compare] section")->required();
  auto* truth = app.add_subcommand("truth", "dense ground-truth report for a plant");
  truth->add_option("plant", path, "file with a [plant] section")->required();

  for (auto* sub : {run, cmp}) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "noise and start-vector seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ioprobe: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (*truth) {
      truth_report(path, std::cout);
      return 0;
    }
    ExperimentConfig cfg = load_experiment(path);
    RunOptions opts;
    if (!out_dir.empty()) opts.out = out_dir;
    for (auto* sub : {run, cmp}) {
      if (*sub && sub->count("--seed")) opts.seed = seed;
    }
    if (opts.seed) apply_seed(cfg, *opts.seed);

    if (*run) {
      const auto dir = resolve_out_dir(opts, cfg, "ioprobe_out");
      for (const auto& row : run_experiment(cfg, dir)) {
        std::cout << row.property << ' ' << row.quantity << " = "
                  << ioprobe::format_double(row.estimate);
        if (row.truth) std::cout << " (truth " << ioprobe::format_double(*row.truth) << ")";
        std::cout << ", " << row.samples_used << " samples\n";
      }
      std::cout << "wrote " << dir.string() << '\n';
    } else {
      const auto dir = resolve_out_dir(opts, cfg, "ioprobe_compare");
      compare_experiment(cfg, dir);
      std::cout << "wrote " << (dir / "compare.csv").string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "ioprobe: " << one_line(e.what()) << '\n';
    return exit_code_for(e);
  }
  return 0;
}
