#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vislide/problems.hpp"
#include "vislide/solvers.hpp"

namespace vislide::bench {

inline constexpr const char* kCsvHeader =
    "k,residual_norm,best_residual_sq,p_calls,q_calls,inner_iters,elapsed_s";

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "VISLIDE_OUTPUT_DIR";

/// Residual thresholds, as fractions of the initial residual |R(x0)|.
inline constexpr std::array<double, 4> kThresholds{1e-1, 1e-2, 1e-3, 1e-4};

enum class ProblemKind { bilinear, logistic, nllsq };
enum class SolverKind { sliding, extragradient };

struct SolverSpec {
  std::string label;
  SolverKind kind = SolverKind::sliding;
  std::optional<double> theta;
  std::optional<double> eta;
  InnerConfig inner;
  std::optional<double> gamma;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::bilinear;
  // bilinear
  Index d = 50;
  double mu = 0.1;
  double L = 10.0;
  double reg = 1.0;
  bool box = false;
  // logistic / nllsq
  std::filesystem::path dataset;
  std::optional<std::size_t> subsample = 200;
  std::optional<Index> n_features;
  bool scale = false;
  double beta_x = 0.1;
  double beta_y = 0.1;
  double delta = 0.1;
  bool constrained = true;
  std::optional<double> lp_override;
  int lp_trials = 200;
  double lp_safety = 1.5;
  // run
  int K = 100;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output = "out";
  bool timing = false;
  std::vector<SolverSpec> solvers;
};

/// Parses the flat key = value format. Top-level keys describe the problem
/// and run; each `[section]` adds one solver. '#' starts a comment.
/// Throws ConfigError on unknown keys, bad values or missing files.
ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Echo of the configuration in the same key = value format.
std::string format_config(const ExperimentConfig& config);

std::string problem_name(ProblemKind kind);

/// A concrete instance for one seed.
struct Instance {
  CompositeVI problem;
  Vector x0;
  double L_p = 0.0;
  double L_q = 0.0;
};

Instance build_instance(const ExperimentConfig& config, std::uint64_t seed);

/// Runs one solver on an instance; NumericError propagates.
RunResult run_solver(const SolverSpec& spec, const Instance& instance, int K);

/// CSV with kCsvHeader. When `timing` is false elapsed_s is written as 0 so
/// repeated runs are byte-identical.
void write_csv(std::ostream& out, const RunResult& run, bool timing);

struct CsvRow {
  int k = 0;
  double residual_norm = 0.0;
  double best_residual_sq = 0.0;
  std::uint64_t p_calls = 0;
  std::uint64_t q_calls = 0;
  int inner_iters = 0;
  double elapsed_s = 0.0;
};

/// One run loaded back from disk; problem, solver and seed come from the
/// file name `<problem>_<solver>_seed<seed>.csv`.
struct RunTrace {
  std::string problem;
  std::string solver;
  std::uint64_t seed = 0;
  std::vector<CsvRow> rows;
  std::optional<double> initial_residual;
};

std::vector<CsvRow> parse_csv(std::istream& in);
RunTrace load_trace(const std::filesystem::path& path);
std::string run_file_name(const std::string& problem, const std::string& solver,
                          std::uint64_t seed);

/// Oracle calls spent when the residual first drops to `level`.
struct FirstHit {
  std::uint64_t p_calls = 0;
  std::uint64_t q_calls = 0;
};
std::optional<FirstHit> first_hit(const std::vector<CsvRow>& rows, double level);
std::optional<FirstHit> first_hit(const RunResult& run, double level);

struct ReportRow {
  std::string solver;
  std::array<std::optional<double>, kThresholds.size()> p_calls;
  std::array<std::optional<double>, kThresholds.size()> q_calls;
  /// Median P calls relative to the reference solver.
  std::array<std::optional<double>, kThresholds.size()> p_ratio;
};

struct ComparisonTable {
  std::string problem;
  std::string reference;
  std::vector<ReportRow> rows;
};

/// Per solver, the median over seeds of P and Q calls needed to reach each
/// threshold. The reference is "extragradient" when present, otherwise the
/// first solver by name. Threshold levels use each trace's
/// initial_residual, falling back to the largest first-row residual among
/// the traces of that seed.
ComparisonTable compare_report(const std::vector<RunTrace>& traces);
std::string format_report(const ComparisonTable& table);

/// Loads every run CSV in `dir` (plus summary.txt when present) and
/// compares them.
ComparisonTable report_directory(const std::filesystem::path& dir);

struct ExperimentOutcome {
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path summary;
  bool numeric_failure = false;
  bool inner_flagged = false;
};

/// Runs every (solver, seed) pair, writing one CSV per run and summary.txt.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Sampled assumption checks for the first configured seed.
std::string probe_report(const ExperimentConfig& config, int trials = 1000);

}  // namespace vislide::bench
