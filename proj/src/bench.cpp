#include "vislide/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "vislide/errors.hpp"
#include "vislide/rng.hpp"

namespace vislide::bench {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::string& key) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("invalid value '" + std::string(text) + "' for " + key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError("non-finite value for " + key);
  }
  return value;
}

bool parse_bool(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + key);
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_number<std::uint64_t>(item.substr(0, dots), "seeds");
      const auto hi = parse_number<std::uint64_t>(item.substr(dots + 2), "seeds");
      if (hi < lo) throw ConfigError("empty seed range");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_number<std::uint64_t>(item, "seeds"));
    }
  }
  if (seeds.empty()) throw ConfigError("seeds list is empty");
  return seeds;
}

bool valid_label(std::string_view label) {
  return !label.empty() && std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

void apply_solver_key(SolverSpec& s, const std::string& key, std::string_view value) {
  const std::string where = "[" + s.label + "] " + key;
  if (key == "type") {
    const auto v = trim(value);
    if (v == "sliding") s.kind = SolverKind::sliding;
    else if (v == "extragradient") s.kind = SolverKind::extragradient;
    else throw ConfigError("unknown solver type '" + std::string(v) + "'");
  } else if (key == "theta") {
    s.theta = parse_number<double>(value, where);
  } else if (key == "eta") {
    s.eta = parse_number<double>(value, where);
  } else if (key == "inner") {
    const auto v = trim(value);
    if (v == "eg") s.inner.method = InnerMethod::eg;
    else if (v == "eag") s.inner.method = InnerMethod::eag;
    else throw ConfigError("unknown inner method '" + std::string(v) + "'");
  } else if (key == "max_inner") {
    s.inner.max_inner = parse_number<int>(value, where);
    if (s.inner.max_inner < 1) throw ConfigError(where + " must be at least 1");
  } else if (key == "abs_tol") {
    s.inner.abs_tol = parse_number<double>(value, where);
  } else if (key == "inner_step") {
    const double step = parse_number<double>(value, where);
    s.inner.eg_step = step;
    s.inner.eag_step = step;
  } else if (key == "fixed_inner") {
    s.inner.fixed_budget = parse_number<int>(value, where);
  } else if (key == "gamma") {
    s.gamma = parse_number<double>(value, where);
  } else {
    throw ConfigError("unknown solver key '" + key + "'");
  }
}

SolverSpec new_solver(std::string label) {
  if (!valid_label(label)) throw ConfigError("invalid solver section name '" + label + "'");
  SolverSpec s;
  s.label = std::move(label);
  if (s.label.rfind("extragradient", 0) == 0 || s.label.rfind("eg", 0) == 0)
    s.kind = SolverKind::extragradient;
  return s;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::bilinear: return "bilinear";
    case ProblemKind::logistic: return "logistic";
    case ProblemKind::nllsq: return "nllsq";
  }
  return "unknown";
}

ExperimentConfig parse_config(std::string_view text, const fs::path& base_dir) {
  ExperimentConfig cfg;
  SolverSpec* current = nullptr;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = " (line " + std::to_string(line_no) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header" + at);
      cfg.solvers.push_back(new_solver(std::string(trim(line.substr(1, line.size() - 2)))));
      current = &cfg.solvers.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value" + at);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (current) {
        apply_solver_key(*current, key, value);
        continue;
      }
      if (key == "problem") {
        if (value == "bilinear") cfg.problem = ProblemKind::bilinear;
        else if (value == "logistic") cfg.problem = ProblemKind::logistic;
        else if (value == "nllsq") cfg.problem = ProblemKind::nllsq;
        else throw ConfigError("unknown problem '" + std::string(value) + "'");
      } else if (key == "d") {
        cfg.d = parse_number<Index>(value, key);
      } else if (key == "mu") {
        cfg.mu = parse_number<double>(value, key);
      } else if (key == "L") {
        cfg.L = parse_number<double>(value, key);
      } else if (key == "reg") {
        cfg.reg = parse_number<double>(value, key);
      } else if (key == "box") {
        cfg.box = parse_bool(value, key);
      } else if (key == "dataset") {
        cfg.dataset = fs::path(std::string(value));
        if (cfg.dataset.is_relative() && !base_dir.empty()) cfg.dataset = base_dir / cfg.dataset;
      } else if (key == "subsample") {
        if (value == "all") cfg.subsample.reset();
        else cfg.subsample = parse_number<std::size_t>(value, key);
      } else if (key == "n_features") {
        cfg.n_features = parse_number<Index>(value, key);
      } else if (key == "scale") {
        cfg.scale = parse_bool(value, key);
      } else if (key == "beta_x") {
        cfg.beta_x = parse_number<double>(value, key);
      } else if (key == "beta_y") {
        cfg.beta_y = parse_number<double>(value, key);
      } else if (key == "delta") {
        cfg.delta = parse_number<double>(value, key);
      } else if (key == "constrained") {
        cfg.constrained = parse_bool(value, key);
      } else if (key == "L_p") {
        cfg.lp_override = parse_number<double>(value, key);
      } else if (key == "lp_trials") {
        cfg.lp_trials = parse_number<int>(value, key);
      } else if (key == "lp_safety") {
        cfg.lp_safety = parse_number<double>(value, key);
      } else if (key == "K") {
        cfg.K = parse_number<int>(value, key);
      } else if (key == "seeds") {
        cfg.seeds = parse_seeds(value);
      } else if (key == "output") {
        cfg.output = fs::path(std::string(value));
      } else if (key == "timing") {
        cfg.timing = parse_bool(value, key);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(e.what() + at);
    }
  }

  if (cfg.solvers.empty()) {
    cfg.solvers.push_back(new_solver("sliding"));
    cfg.solvers.push_back(new_solver("extragradient"));
  }
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.solvers.size(); ++j)
      if (cfg.solvers[i].label == cfg.solvers[j].label)
        throw ConfigError("duplicate solver section [" + cfg.solvers[i].label + "]");
  if (cfg.K < 1) throw ConfigError("K must be at least 1");
  if (cfg.d < 1) throw ConfigError("d must be positive");
  if (!(cfg.mu > 0.0) || cfg.mu > cfg.L) throw ConfigError("need 0 < mu <= L");
  if (!(cfg.delta >= 0.0)) throw ConfigError("delta must be nonnegative");
  if (cfg.lp_trials < 1) throw ConfigError("lp_trials must be at least 1");
  if (cfg.problem != ProblemKind::bilinear) {
    if (cfg.dataset.empty()) throw ConfigError("logistic/nllsq problems need a dataset path");
    if (!fs::exists(cfg.dataset))
      throw ConfigError("dataset file not found: " + cfg.dataset.string());
    if (cfg.subsample && *cfg.subsample == 0) throw ConfigError("subsample must be positive");
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "problem = " << problem_name(c.problem) << '\n';
  if (c.problem == ProblemKind::bilinear) {
    o << "d = " << c.d << "\nmu = " << format_number(c.mu) << "\nL = " << format_number(c.L)
      << "\nreg = " << format_number(c.reg) << "\nbox = " << (c.box ? "true" : "false") << '\n';
  } else {
    o << "dataset = " << c.dataset.string() << "\nsubsample = "
      << (c.subsample ? std::to_string(*c.subsample) : std::string("all"))
      << "\nscale = " << (c.scale ? "true" : "false") << "\nbeta_x = " << format_number(c.beta_x)
      << "\nbeta_y = " << format_number(c.beta_y) << "\ndelta = " << format_number(c.delta)
      << "\nconstrained = " << (c.constrained ? "true" : "false") << '\n';
    if (c.n_features) o << "n_features = " << *c.n_features << '\n';
    if (c.lp_override) o << "L_p = " << format_number(*c.lp_override) << '\n';
    else o << "lp_trials = " << c.lp_trials << "\nlp_safety = " << format_number(c.lp_safety) << '\n';
  }
  o << "K = " << c.K << "\nseeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) o << (i ? "," : "") << c.seeds[i];
  o << "\noutput = " << c.output.string() << "\ntiming = " << (c.timing ? "true" : "false")
    << '\n';
  for (const auto& s : c.solvers) {
    o << "\n[" << s.label << "]\ntype = "
      << (s.kind == SolverKind::sliding ? "sliding" : "extragradient") << '\n';
    if (s.kind == SolverKind::sliding) {
      if (s.theta) o << "theta = " << format_number(*s.theta) << '\n';
      if (s.eta) o << "eta = " << format_number(*s.eta) << '\n';
      o << "inner = " << (s.inner.method == InnerMethod::eg ? "eg" : "eag") << '\n';
      o << "max_inner = " << s.inner.max_inner << '\n';
      if (s.inner.abs_tol) o << "abs_tol = " << format_number(*s.inner.abs_tol) << '\n';
      if (s.inner.eg_step) o << "inner_step = " << format_number(*s.inner.eg_step) << '\n';
      if (s.inner.fixed_budget) o << "fixed_inner = " << *s.inner.fixed_budget << '\n';
    } else if (s.gamma) {
      o << "gamma = " << format_number(*s.gamma) << '\n';
    }
  }
  return o.str();
}

Instance build_instance(const ExperimentConfig& config, std::uint64_t seed) {
  Instance inst;
  const std::uint64_t instance_seed = derive_seed(seed, SeedStream::instance);
  if (config.problem == ProblemKind::bilinear) {
    auto prob = std::make_shared<const BilinearProblem>(
        make_bilinear(config.d, config.mu, config.L, instance_seed, config.reg));
    inst.problem = bilinear_problem(prob, config.box);
  } else {
    SparseDataset ds = load_libsvm(config.dataset, config.n_features);
    const bool logistic = config.problem == ProblemKind::logistic;
    ds = map_labels(std::move(ds),
                    logistic ? LabelScheme::plus_minus_one : LabelScheme::zero_one);
    if (config.scale) ds = scale_unit(std::move(ds));
    if (config.subsample && *config.subsample < ds.n_rows())
      ds = subsample(ds, *config.subsample, derive_seed(seed, SeedStream::subsample));
    auto prob = std::make_shared<AdversarialProblem>();
    prob->loss = logistic ? AdversarialLoss::logistic : AdversarialLoss::nllsq;
    prob->data = std::move(ds);
    prob->beta_x = config.beta_x;
    prob->beta_y = config.beta_y;
    prob->delta = config.delta;
    const LipschitzBounds bounds = lipschitz_bounds(
        *prob, {config.lp_trials, config.lp_safety, derive_seed(seed, SeedStream::probe),
                config.lp_override});
    inst.problem = adversarial_problem(prob, bounds.p, config.constrained);
  }
  inst.L_p = inst.problem.p.lipschitz_hint().value_or(0.0);
  inst.L_q = inst.problem.q.lipschitz_hint().value_or(0.0);
  if (!(inst.L_p > 0.0)) throw ConfigError("instance has a zero Lipschitz constant for P");
  Rng rng(derive_seed(seed, SeedStream::start_point));
  inst.x0 = uniform_vector(inst.problem.dim(), -1.0, 1.0, rng);
  return inst;
}

RunResult run_solver(const SolverSpec& spec, const Instance& instance, int K) {
  RunResult result;
  if (spec.kind == SolverKind::sliding) {
    SlidingParams params;
    params.L_p = instance.L_p;
    params.L_q = instance.L_q;
    params.theta = spec.theta;
    params.eta = spec.eta;
    params.K = K;
    params.inner = spec.inner;
    params.x0 = instance.x0;
    result = sliding_solve(instance.problem, params);
  } else {
    const double gamma = spec.gamma.value_or(default_extragradient_step(instance.L_p, instance.L_q));
    result = extragradient_solve(instance.problem, gamma, K, instance.x0);
  }
  result.config = spec.label;
  return result;
}

void write_csv(std::ostream& out, const RunResult& run, bool timing) {
  out << kCsvHeader << '\n';
  for (const auto& r : run.records) {
    out << r.k << ',' << format_number(r.residual_norm) << ',' << format_number(r.best_residual_sq)
        << ',' << r.p_calls << ',' << r.q_calls << ',' << r.inner_iters << ','
        << format_number(timing ? r.elapsed : 0.0) << '\n';
  }
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ConfigError("CSV header does not match the run schema");
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t comma; (comma = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    f.push_back(rest);
    const std::string at = "CSV line " + std::to_string(line_no);
    if (f.size() != 7) throw ConfigError(at + ": expected 7 fields");
    rows.push_back({parse_number<int>(f[0], at), parse_number<double>(f[1], at),
                    parse_number<double>(f[2], at), parse_number<std::uint64_t>(f[3], at),
                    parse_number<std::uint64_t>(f[4], at), parse_number<int>(f[5], at),
                    parse_number<double>(f[6], at)});
  }
  return rows;
}

std::string run_file_name(const std::string& problem, const std::string& solver,
                          std::uint64_t seed) {
  return problem + "_" + solver + "_seed" + std::to_string(seed) + ".csv";
}

RunTrace load_trace(const fs::path& path) {
  const std::string stem = path.stem().string();
  const auto first = stem.find('_');
  const auto seed_at = stem.rfind("_seed");
  if (first == std::string::npos || seed_at == std::string::npos || seed_at <= first)
    throw ConfigError("run file name must look like <problem>_<solver>_seed<n>.csv: " +
                      path.string());
  RunTrace t;
  t.problem = stem.substr(0, first);
  t.solver = stem.substr(first + 1, seed_at - first - 1);
  t.seed = parse_number<std::uint64_t>(std::string_view(stem).substr(seed_at + 5), "seed");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  t.rows = parse_csv(in);
  return t;
}

std::optional<FirstHit> first_hit(const std::vector<CsvRow>& rows, double level) {
  for (const auto& r : rows)
    if (r.residual_norm <= level) return FirstHit{r.p_calls, r.q_calls};
  return std::nullopt;
}

std::optional<FirstHit> first_hit(const RunResult& run, double level) {
  for (const auto& r : run.records)
    if (r.residual_norm <= level) return FirstHit{r.p_calls, r.q_calls};
  return std::nullopt;
}

ComparisonTable compare_report(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw ConfigError("no run CSVs to compare");
  if (traces.size() < 2) throw ConfigError("comparison needs at least two runs");
  ComparisonTable table;
  table.problem = traces.front().problem;
  for (const auto& t : traces)
    if (t.problem != table.problem)
      throw ConfigError("cannot compare runs of different problems (" + table.problem + " vs " +
                        t.problem + ")");

  std::map<std::uint64_t, double> fallback;
  for (const auto& t : traces)
    if (!t.rows.empty())
      fallback[t.seed] = std::max(fallback[t.seed], t.rows.front().residual_norm);

  std::map<std::string, std::vector<const RunTrace*>> by_solver;
  for (const auto& t : traces) by_solver[t.solver].push_back(&t);
  table.reference = by_solver.count("extragradient") ? "extragradient" : by_solver.begin()->first;

  constexpr double inf = std::numeric_limits<double>::infinity();
  auto median_or_none = [](std::vector<double> v) -> std::optional<double> {
    const double m = median(std::move(v));
    if (!std::isfinite(m)) return std::nullopt;
    return m;
  };
  for (const auto& [solver, runs] : by_solver) {
    ReportRow row;
    row.solver = solver;
    for (std::size_t j = 0; j < kThresholds.size(); ++j) {
      std::vector<double> p, q;
      for (const RunTrace* t : runs) {
        const double base = t->initial_residual.value_or(fallback[t->seed]);
        const auto hit = first_hit(t->rows, kThresholds[j] * base);
        p.push_back(hit ? static_cast<double>(hit->p_calls) : inf);
        q.push_back(hit ? static_cast<double>(hit->q_calls) : inf);
      }
      row.p_calls[j] = median_or_none(std::move(p));
      row.q_calls[j] = median_or_none(std::move(q));
    }
    table.rows.push_back(std::move(row));
  }
  const auto ref = std::find_if(table.rows.begin(), table.rows.end(),
                                [&](const ReportRow& r) { return r.solver == table.reference; });
  const ReportRow ref_row = *ref;
  for (auto& row : table.rows)
    for (std::size_t j = 0; j < kThresholds.size(); ++j)
      if (row.p_calls[j] && ref_row.p_calls[j] && *ref_row.p_calls[j] > 0.0)
        row.p_ratio[j] = *row.p_calls[j] / *ref_row.p_calls[j];
  return table;
}

std::string format_report(const ComparisonTable& table) {
  std::ostringstream o;
  auto cell = [](const std::optional<double>& v, int precision) {
    if (!v) return std::string("—");
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << *v;
    return s.str();
  };
  o << "problem: " << table.problem << "  (ratios relative to " << table.reference << ")\n";
  for (std::size_t j = 0; j < kThresholds.size(); ++j) {
    o << "\nthreshold " << format_number(kThresholds[j]) << " x initial residual\n";
    o << "  solver                  P-calls      Q-calls      P-ratio\n";
    for (const auto& row : table.rows) {
      std::string name = row.solver;
      name.resize(std::max<std::size_t>(name.size(), 22), ' ');
      std::string p = cell(row.p_calls[j], 1), q = cell(row.q_calls[j], 1),
                  r = cell(row.p_ratio[j], 3);
      p.resize(std::max<std::size_t>(p.size(), 12), ' ');
      q.resize(std::max<std::size_t>(q.size(), 12), ' ');
      o << "  " << name << "  " << p << ' ' << q << ' ' << r << '\n';
    }
  }
  return o.str();
}

ComparisonTable report_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::map<std::uint64_t, double> initial;
  if (std::ifstream summary(dir / "summary.txt"); summary) {
    const std::string prefix = "initial_residual.seed";
    for (std::string line; std::getline(summary, line);) {
      if (line.rfind(prefix, 0) != 0) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto seed = parse_number<std::uint64_t>(
          trim(std::string_view(line).substr(prefix.size(), eq - prefix.size())), "summary seed");
      initial[seed] = parse_number<double>(std::string_view(line).substr(eq + 1), "summary");
    }
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RunTrace> traces;
  for (const auto& f : files) {
    RunTrace t = load_trace(f);
    if (auto it = initial.find(t.seed); it != initial.end()) t.initial_residual = it->second;
    traces.push_back(std::move(t));
  }
  return compare_report(traces);
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  ExperimentOutcome outcome;
  fs::path out_dir = config.output;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) out_dir = env;
  fs::create_directories(out_dir);

  std::ostringstream summary;
  summary << "# experiment summary\n\n[config]\n" << format_config(config) << "\n[initial]\n";
  std::ostringstream runs;
  const std::string problem = problem_name(config.problem);

  for (const std::uint64_t seed : config.seeds) {
    const Instance inst = build_instance(config, seed);
    const double r0 = eval_R(inst.problem, project(inst.problem.feasible, inst.x0)).norm();
    summary << "initial_residual.seed" << seed << " = " << format_number(r0) << '\n';
    for (const auto& spec : config.solvers) {
      RunResult result;
      std::string status = "ok";
      try {
        result = run_solver(spec, inst, config.K);
      } catch (const NumericError& e) {
        result = e.partial();
        status = "numeric_failure at iteration " + std::to_string(e.iteration());
        outcome.numeric_failure = true;
      }
      result.seed = seed;
      const fs::path file = out_dir / run_file_name(problem, spec.label, seed);
      {
        std::ofstream csv(file, std::ios::binary);
        if (!csv) throw ConfigError("cannot write " + file.string());
        write_csv(csv, result, config.timing);
      }
      outcome.csv_files.push_back(file);
      const auto flagged = std::count_if(result.records.begin(), result.records.end(),
                                         [](const IterateRecord& r) { return r.inner_flag; });
      if (flagged > 0) outcome.inner_flagged = true;
      runs << "run " << spec.label << " seed " << seed << ": status = " << status
           << ", records = " << result.records.size();
      if (!result.records.empty()) {
        const auto& last = result.records.back();
        runs << ", p_calls = " << last.p_calls << ", q_calls = " << last.q_calls
             << ", best_residual_sq = " << format_number(last.best_residual_sq);
      }
      runs << ", inner_flagged = " << flagged << '\n';
      for (double eps : kThresholds) {
        runs << "  reach " << format_number(eps) << " x initial: ";
        if (auto hit = first_hit(result, eps * r0))
          runs << "p_calls = " << hit->p_calls << ", q_calls = " << hit->q_calls << '\n';
        else
          runs << "never\n";
      }
    }
  }
  summary << "\n[runs]\n" << runs.str();
  if (outcome.numeric_failure) summary << "\nFLAGGED: numeric failure in at least one run\n";
  if (outcome.inner_flagged)
    summary << "\nFLAGGED: inner solver exhausted its budget; convergence bound not certified\n";
  outcome.summary = out_dir / "summary.txt";
  std::ofstream(outcome.summary, std::ios::binary) << summary.str();
  return outcome;
}

std::string probe_report(const ExperimentConfig& config, int trials) {
  const Instance inst = build_instance(config, config.seeds.front());
  const std::uint64_t seed = derive_seed(config.seeds.front(), SeedStream::probe);
  const Index dim = inst.problem.dim();
  std::ostringstream o;
  o << "problem " << problem_name(config.problem) << ", dim " << dim << ", seed "
    << config.seeds.front() << ", " << trials << " pairs in [-10, 10]^dim\n";
  auto sampler = [&](std::uint64_t stream) {
    return uniform_pair_sampler(dim, -10.0, 10.0, derive_seed(seed, stream));
  };
  const double q_mono = probe_monotonicity(inst.problem.q, sampler(1), trials);
  const double p_mono = probe_monotonicity(inst.problem.p, sampler(2), trials);
  const double q_lip = estimate_lipschitz(inst.problem.q, sampler(3), trials);
  const double p_lip = estimate_lipschitz(inst.problem.p, sampler(4), trials);
  o << "Q monotonicity (min ratio):  " << format_number(q_mono)
    << (q_mono >= -1e-12 ? "  consistent with monotone\n" : "  VIOLATED\n");
  o << "P monotonicity (min ratio):  " << format_number(p_mono)
    << (p_mono < -1e-12 ? "  non-monotone witness found\n" : "\n");
  o << "Q Lipschitz estimate:        " << format_number(q_lip) << "  (declared "
    << format_number(inst.L_q) << ")" << (q_lip <= inst.L_q * (1 + 1e-9) ? "\n" : "  EXCEEDED\n");
  o << "P Lipschitz estimate:        " << format_number(p_lip) << "  (declared "
    << format_number(inst.L_p) << ")" << (p_lip <= inst.L_p * (1 + 1e-9) ? "\n" : "  EXCEEDED\n");
  if (inst.problem.known_solution) {
    const double minty = probe_minty(inst.problem, sampler(5), trials);
    o << "Minty <R(x), x - x*> ratio:  " << format_number(minty)
      << (minty >= -1e-10 ? "  consistent\n" : "  VIOLATED\n");
  }
  return o.str();
}

}  // namespace vislide::bench
