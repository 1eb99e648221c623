#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "vislide/bench.hpp"
#include "vislide/data.hpp"
#include "vislide/errors.hpp"
#include "vislide/rng.hpp"

using namespace vislide;
using namespace vislide::bench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "vislide-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_bilinear(const fs::path& out, int K = 20) {
  ExperimentConfig c = parse_config("problem = bilinear\nd = 6\nmu = 0.1\nL = 5\nseeds = 0..1\n");
  c.K = K;
  c.output = out;
  return c;
}

fs::path write_dataset(const fs::path& dir, bool zero_one) {
  const SparseDataset ds =
      synthetic_binary_dataset(30, 8, 3, zero_one ? LabelScheme::zero_one : LabelScheme::plus_minus_one, 4);
  const fs::path file = dir / "tiny.libsvm";
  std::ofstream(file) << to_libsvm(ds);
  return file;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(VISLIDE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# comment\nproblem = bilinear\nd = 7\nK = 12\nseeds = 1, 3..5\n"
      "[sliding-eag]\ninner = eag\nmax_inner = 50\n[extragradient]\ngamma = 0.01\n");
  CHECK(c.d == 7);
  CHECK(c.K == 12);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 3, 4, 5});
  REQUIRE(c.solvers.size() == 2);
  CHECK(c.solvers[0].kind == SolverKind::sliding);
  CHECK(c.solvers[0].inner.method == InnerMethod::eag);
  CHECK(c.solvers[0].inner.max_inner == 50);
  CHECK(c.solvers[1].kind == SolverKind::extragradient);
  CHECK(*c.solvers[1].gamma == 0.01);

  const ExperimentConfig defaults = parse_config("");
  REQUIRE(defaults.solvers.size() == 2);
  CHECK(defaults.solvers[0].label == "sliding");
  CHECK(defaults.solvers[1].label == "extragradient");

  const ExperimentConfig echoed = parse_config(format_config(c));
  CHECK(echoed.d == c.d);
  CHECK(echoed.seeds == c.seeds);
  CHECK(echoed.solvers.size() == c.solvers.size());
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("K = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("d = x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("mu = 5\nL = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[a]\n[a]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[a]\nnope = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[a]\ninner = newton\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = logistic\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = logistic\ndataset = /nonexistent/file\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = cubic\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST_CASE("a single outer iteration writes one data row per solver") {
  TempDir tmp;
  ExperimentConfig c = small_bilinear(tmp.path, 1);
  c.seeds = {0};
  const ExperimentOutcome out = run_experiment(c);
  REQUIRE(out.csv_files.size() == 2);
  for (const auto& f : out.csv_files) {
    std::istringstream in(slurp(f));
    std::string header;
    std::getline(in, header);
    CHECK(header == kCsvHeader);
    std::ifstream again(f);
    CHECK(parse_csv(again).size() == 1);
  }
  CHECK(fs::exists(out.summary));
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir a, b;
  const ExperimentOutcome oa = run_experiment(small_bilinear(a.path));
  const ExperimentOutcome ob = run_experiment(small_bilinear(b.path));
  REQUIRE(oa.csv_files.size() == 4);
  for (std::size_t i = 0; i < oa.csv_files.size(); ++i) {
    CHECK(oa.csv_files[i].filename() == ob.csv_files[i].filename());
    CHECK(slurp(oa.csv_files[i]) == slurp(ob.csv_files[i]));
  }
  // The summary echoes the output directory; everything else must match.
  auto without_output = [](std::string text) {
    const auto at = text.find("output = ");
    return text.erase(at, text.find('\n', at) - at);
  };
  CHECK(without_output(slurp(oa.summary)) == without_output(slurp(ob.summary)));
}

TEST_CASE("file names round-trip through load_trace") {
  TempDir tmp;
  run_experiment(small_bilinear(tmp.path, 5));
  const RunTrace t = load_trace(tmp.path / run_file_name("bilinear", "sliding", 1));
  CHECK(t.problem == "bilinear");
  CHECK(t.solver == "sliding");
  CHECK(t.seed == 1);
  CHECK(t.rows.size() == 5);
  CHECK(t.rows.back().p_calls == 10);
}

TEST_CASE("CSV parsing rejects malformed files") {
  std::istringstream bad_header("k,residual\n0,1\n");
  CHECK_THROWS(parse_csv(bad_header));
  std::istringstream short_row(std::string(kCsvHeader) + "\n0,1,1,2\n");
  CHECK_THROWS(parse_csv(short_row));
}

TEST_CASE("comparison of identical traces has unit ratio") {
  TempDir tmp;
  run_experiment(small_bilinear(tmp.path, 200));
  RunTrace t = load_trace(tmp.path / run_file_name("bilinear", "sliding", 0));
  RunTrace u = t;
  u.solver = "extragradient";
  const ComparisonTable table = compare_report({t, u});
  CHECK(table.reference == "extragradient");
  for (const auto& row : table.rows)
    for (const auto& r : row.p_ratio)
      if (r) CHECK(*r == 1.0);
  CHECK(table.rows[0].p_ratio[0].has_value());
  CHECK_FALSE(format_report(table).empty());
}

TEST_CASE("comparison errors") {
  CHECK_THROWS_AS(compare_report({}), ConfigError);
  TempDir tmp;
  run_experiment(small_bilinear(tmp.path, 3));
  RunTrace t = load_trace(tmp.path / run_file_name("bilinear", "sliding", 0));
  CHECK_THROWS_AS(compare_report({t}), ConfigError);
  RunTrace other = t;
  other.problem = "logistic";
  other.solver = "extragradient";
  CHECK_THROWS_AS(compare_report({t, other}), ConfigError);
}

TEST_CASE("report over a run directory") {
  TempDir tmp;
  run_experiment(small_bilinear(tmp.path, 300));
  const ComparisonTable table = report_directory(tmp.path);
  CHECK(table.problem == "bilinear");
  CHECK(table.rows.size() == 2);
  for (const auto& row : table.rows) CHECK(row.p_calls[0].has_value());
}

TEST_CASE("output directory can be overridden from the environment") {
  TempDir configured, overridden;
  ::setenv(kOutputDirEnv, overridden.path.c_str(), 1);
  const ExperimentOutcome out = run_experiment(small_bilinear(configured.path, 2));
  ::unsetenv(kOutputDirEnv);
  CHECK(out.summary.parent_path() == overridden.path);
  CHECK(fs::is_empty(configured.path));
}

TEST_CASE("logistic and NLLSQ experiments from a LibSVM file") {
  TempDir tmp;
  for (const char* problem : {"logistic", "nllsq"}) {
    const fs::path data = write_dataset(tmp.path, std::string(problem) == "nllsq");
    ExperimentConfig c = parse_config(std::string("problem = ") + problem +
                                          "\ndataset = tiny.libsvm\nsubsample = 20\nK = 5\n",
                                      tmp.path);
    c.output = tmp.path / problem;
    const ExperimentOutcome out = run_experiment(c);
    CHECK_FALSE(out.numeric_failure);
    CHECK(out.csv_files.size() == 2);
    const Instance inst = build_instance(c, 0);
    CHECK(inst.problem.dim() == 8 * 21);
    CHECK(inst.L_q == doctest::Approx(0.1));
    CHECK_FALSE(probe_report(c, 50).empty());
  }
}

TEST_CASE("sliding needs fewer P calls when Q dominates") {
  auto prob = std::make_shared<BilinearProblem>(make_bilinear(20, 0.1, 1.0, 3, 100.0));
  prob->A /= lipschitz_bounds(*prob).p;
  const CompositeVI vi = bilinear_problem(prob);
  Rng rng(4);
  const Vector x0 = uniform_vector(vi.dim(), -1, 1, rng);
  const double r0 = eval_R(vi, x0).norm();
  SlidingParams prm;
  prm.L_p = 1.0;
  prm.K = 500;
  prm.x0 = x0;
  const RunResult s = sliding_solve(vi, prm);
  const RunResult e = extragradient_solve(vi, default_extragradient_step(1.0, 100.0), 2000, x0);
  int compared = 0;
  for (double eps : kThresholds) {
    const auto hs = first_hit(s, eps * r0);
    const auto he = first_hit(e, eps * r0);
    if (hs && he) {
      ++compared;
      CHECK(hs->p_calls < he->p_calls);
    }
  }
  CHECK(compared == static_cast<int>(kThresholds.size()));
}

TEST_CASE("command-line exit codes") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "run.cfg";
  std::ofstream(cfg) << "problem = bilinear\nd = 4\nK = 3\noutput = " << (tmp.path / "out").string()
                     << "\n";
  CHECK(run_cli("run " + cfg.string()) == 0);
  CHECK(fs::exists(tmp.path / "out" / "summary.txt"));
  CHECK(run_cli("report " + (tmp.path / "out").string()) == 0);
  CHECK(run_cli("probe --trials 20 " + cfg.string()) == 0);
  CHECK(run_cli("dataset-url") == 0);

  std::ofstream(tmp.path / "bad.cfg") << "nonsense = 1\n";
  CHECK(run_cli("run " + (tmp.path / "bad.cfg").string()) == 2);
  CHECK(run_cli("run /nonexistent.cfg") == 2);
  CHECK(run_cli("") == 2);

  std::ofstream(tmp.path / "diverge.cfg") << "problem = bilinear\nd = 4\nK = 50\noutput = "
                                           << (tmp.path / "div").string()
                                           << "\n[extragradient]\ngamma = 1e200\n";
  CHECK(run_cli("run " + (tmp.path / "diverge.cfg").string()) == 3);
}
