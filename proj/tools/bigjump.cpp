// Command-line front end: one subcommand per experiment kind plus a suite
// runner. Exit codes: 0 pass, 1 error, 2 fail, 3 inconclusive; the suite
// returns 0 only when every experiment matches its expected verdict.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bigjump/runner.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string out_dir;
};

int run_one(const std::string& kind, const CommonOptions& opts) {
  using namespace bigjump;
  ExperimentConfig cfg;
  try {
    cfg = parse_config(opts.config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  if (cfg.experiment != kind) {
    std::cerr << "config declares experiment '" << cfg.experiment
              << "' but the subcommand is '" << kind << "'\n";
    return 1;
  }
  if (opts.seed) {
    // Re-derive the canonical form so the archive records the seed actually used.
    nlohmann::json patched = cfg.canonical;
    patched["seed"] = *opts.seed;
    cfg = parse_config_json(patched);
  }
  try {
    const RunOutcome outcome =
        run_experiment(cfg, opts.workers, std::filesystem::path(opts.out_dir));
    const auto& main = outcome.report.main;
    std::cout << main.tag << ": " << verdict_name(main.verdict);
    if (const auto idx = main.curve.deepest_resolvable()) {
      const auto& pt = main.curve.points[*idx];
      std::cout << " (deepest x = " << pt.x << ", ratio = " << pt.ratio << ", ci = ["
                << pt.ci_lo << ", " << pt.ci_hi << "])";
    }
    std::cout << '\n';
    if (!outcome.archive_dir.empty()) {
      std::cout << "archive: " << outcome.archive_dir.string() << '\n';
    }
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo verification toolkit for multivariate heavy-tail "
               "asymptotics on ruin sets"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string manifest;
  std::string suite_out;
  std::string summary_path;

  for (const auto& kind : bigjump::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "override the master seed");
    sub->add_option("--workers", opts.workers, "worker threads (0 = auto)");
    sub->add_option("--out", opts.out_dir, "archive directory");
    sub->callback([kind, &opts]() { std::exit(run_one(kind, opts)); });
  }

  auto* suite = app.add_subcommand("suite", "run every config listed in a manifest");
  suite->add_option("--manifest", manifest, "text file with one config path per line")
      ->required()
      ->check(CLI::ExistingFile);
  suite->add_option("--workers", opts.workers, "worker threads (0 = auto)");
  suite->add_option("--out", suite_out, "root directory for the per-experiment archives");
  suite->add_option("--summary", summary_path, "write the summary CSV here (default stdout)");
  suite->callback([&]() {
    int code;
    if (summary_path.empty()) {
      code = bigjump::emit_suite(manifest, opts.workers, suite_out, std::cout);
    } else {
      std::ofstream os(summary_path);
      if (!os) {
        std::cerr << "cannot open summary path: " << summary_path << '\n';
        std::exit(1);
      }
      code = bigjump::emit_suite(manifest, opts.workers, suite_out, os);
    }
    std::exit(code);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
