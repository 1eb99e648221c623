// Command-line runner for extragradient sliding experiments.
//
//   vislide run <config>     run every (solver, seed) pair, write CSVs + summary
//   vislide report <dir>     compare the runs stored in a directory
//   vislide probe <config>   sampled monotonicity / Lipschitz checks
//   vislide dataset-url      print where to download the mushrooms file

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vislide/bench.hpp"
#include "vislide/data.hpp"
#include "vislide/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extragradient sliding benchmark runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string report_dir;
  int probe_trials = 1000;

  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  run->add_option("config", config_path, "Experiment config file")->required();

  auto* report = app.add_subcommand("report", "Compare run CSVs in a directory");
  report->add_option("dir", report_dir, "Directory holding run CSVs")->required();

  auto* probe = app.add_subcommand("probe", "Sampled assumption probes for a configuration");
  probe->add_option("config", config_path, "Experiment config file")->required();
  probe->add_option("--trials", probe_trials, "Sampled pairs per probe");

  app.add_subcommand("dataset-url", "Print the canonical mushrooms download URL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      const auto config = vislide::bench::load_config(config_path);
      const auto outcome = vislide::bench::run_experiment(config);
      std::cout << "wrote " << outcome.csv_files.size() << " run files and "
                << outcome.summary.string() << '\n';
      if (outcome.inner_flagged)
        std::cerr << "warning: some inner solves hit max_inner without certification\n";
      if (outcome.numeric_failure) {
        std::cerr << "error: numeric failure, see " << outcome.summary.string() << '\n';
        return kNumericFailure;
      }
    } else if (*report) {
      std::cout << vislide::bench::format_report(vislide::bench::report_directory(report_dir));
    } else if (*probe) {
      std::cout << vislide::bench::probe_report(vislide::bench::load_config(config_path),
                                                probe_trials);
    } else {
      std::cout << vislide::kMushroomsUrl << '\n';
    }
  } catch (const vislide::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
