#include "vislide/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "vislide/errors.hpp"

namespace vislide {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ConfigError(std::string(name) + " must be positive and finite");
}

double resolve_lq(const CompositeVI& problem, const SlidingParams& params) {
  if (params.L_q) return *params.L_q;
  if (auto hint = problem.q.lipschitz_hint()) return *hint;
  throw ConfigError("inner step needs L_q: set it in the parameters or on the Q operator");
}

}  // namespace

double SlidingParams::resolved_theta() const {
  require_positive(L_p, "L_p");
  const double t = theta.value_or(1.0 / (2.0 * L_p));
  require_positive(t, "theta");
  return t;
}

double SlidingParams::resolved_eta() const {
  const double e = eta.value_or(resolved_theta() / 2.0);
  require_positive(e, "eta");
  return e;
}

bool RunResult::any_inner_flag() const {
  return std::any_of(records.begin(), records.end(),
                     [](const IterateRecord& r) { return r.inner_flag; });
}

NumericError::NumericError(int iteration, RunResult partial)
    : std::runtime_error("non-finite iterate at outer iteration " + std::to_string(iteration)),
      iteration_(iteration),
      partial_(std::move(partial)) {}

Vector b_operator(const CompositeVI& problem, const Vector& x_k, const Vector& P_xk, double theta,
                  const Vector& u) {
  require_positive(theta, "theta");
  if (x_k.size() != problem.dim() || P_xk.size() != problem.dim() || u.size() != problem.dim())
    throw std::invalid_argument("b_operator: dimension mismatch");
  return P_xk + problem.q(u) + (u - x_k) / theta;
}

bool check_inexact(double b_norm, double dist, double L_p, double theta, double abs_tol) {
  if (b_norm <= abs_tol) return true;
  const double c = L_p / std::sqrt(3.0);
  return (1.0 + theta * c) * b_norm <= c * dist;
}

InnerResult inner_solve(const CompositeVI& problem, const Vector& x_k, const Vector& P_xk,
                        const SlidingParams& params) {
  const InnerConfig& cfg = params.inner;
  if (cfg.max_inner < 1) throw ConfigError("max_inner must be at least 1");
  if (cfg.fixed_budget && *cfg.fixed_budget < 0) throw ConfigError("fixed inner budget is negative");
  const double theta = params.resolved_theta();
  const bool eag = cfg.method == InnerMethod::eag;
  const std::optional<double>& user_step = eag ? cfg.eag_step : cfg.eg_step;
  const double step =
      user_step ? *user_step : 1.0 / ((eag ? 8.0 : 2.0) * (resolve_lq(problem, params) + 1.0 / theta));
  require_positive(step, "inner step");
  const double abs_tol =
      cfg.abs_tol.value_or(1e-12 * params.L_p * std::max(1.0, x_k.norm()));
  if (abs_tol < 0.0) throw ConfigError("abs_tol must be nonnegative");

  const bool free = problem.feasible.is_free();
  const int limit = cfg.fixed_budget.value_or(cfg.max_inner);

  Vector u = x_k;
  for (int t = 0;; ++t) {
    const Vector bu = b_operator(problem, x_k, P_xk, theta, u);
    const double beta = eag ? 1.0 / (t + 2.0) : 0.0;
    const Vector base = eag ? Vector(u + beta * (x_k - u)) : u;
    // With constraints the natural residual |u - proj(u - s B(u))| / s
    // stands in for |B(u)|; it coincides with it when the set is free.
    Vector probe = project(problem.feasible, u - step * bu);
    const double b_norm = free ? bu.norm() : (u - probe).norm() / step;
    const bool at_end = t == limit;
    if (!cfg.fixed_budget || at_end) {
      const bool ok = check_inexact(b_norm, (x_k - u).norm(), params.L_p, theta, abs_tol);
      if (ok || at_end) return {std::move(u), t, ok};
    }
    if (eag) probe = project(problem.feasible, base - step * bu);
    const Vector b_half = b_operator(problem, x_k, P_xk, theta, probe);
    u = project(problem.feasible, base - step * b_half);
  }
}

RunResult sliding_solve(const CompositeVI& problem, const SlidingParams& params) {
  problem.validate();
  if (params.x0.size() != problem.dim())
    throw std::invalid_argument("sliding_solve: x0 has the wrong dimension");
  if (params.K < 1) throw ConfigError("K must be at least 1");
  const double eta = params.resolved_eta();

  CompositeVI run = problem;
  run.reset_counters();
  RunResult result;
  result.records.reserve(static_cast<std::size_t>(params.K));
  Vector x = project(run.feasible, params.x0);
  double best = std::numeric_limits<double>::infinity();
  const auto start = Clock::now();

  for (int k = 0; k < params.K; ++k) {
    const Vector p_xk = run.p(x);
    InnerResult inner = inner_solve(run, x, p_xk, params);
    const Vector r_u = eval_R(run, inner.u);
    const double res_sq = r_u.squaredNorm();
    if (!std::isfinite(res_sq) || !inner.u.allFinite()) {
      result.final_x = x;
      throw NumericError(k, std::move(result));
    }
    if (res_sq < best || result.best_u.size() == 0) {
      best = std::min(best, res_sq);
      result.best_u = inner.u;
    }
    x = project(run.feasible, x - eta * r_u);
    const OracleCounter c = run.counters();
    result.records.push_back({k, std::sqrt(res_sq), best, c.p_calls, c.q_calls, inner.iters,
                              !inner.certified, seconds_since(start)});
    if (!x.allFinite()) {
      result.final_x = x;
      throw NumericError(k, std::move(result));
    }
  }
  result.final_x = std::move(x);
  return result;
}

double default_extragradient_step(double L_p, double L_q) {
  const double total = L_p + L_q;
  require_positive(total, "L_p + L_q");
  return 1.0 / (2.0 * total);
}

RunResult extragradient_solve(const CompositeVI& problem, double gamma, int K, const Vector& x0) {
  problem.validate();
  require_positive(gamma, "gamma");
  if (K < 1) throw ConfigError("K must be at least 1");
  if (x0.size() != problem.dim())
    throw std::invalid_argument("extragradient_solve: x0 has the wrong dimension");

  CompositeVI run = problem;
  run.reset_counters();
  RunResult result;
  result.records.reserve(static_cast<std::size_t>(K));
  Vector x = project(run.feasible, x0);
  double best = std::numeric_limits<double>::infinity();
  const auto start = Clock::now();

  for (int k = 0; k < K; ++k) {
    const Vector half = project(run.feasible, x - gamma * eval_R(run, x));
    const Vector r_half = eval_R(run, half);
    const double res_sq = r_half.squaredNorm();
    if (!std::isfinite(res_sq)) {
      result.final_x = x;
      throw NumericError(k, std::move(result));
    }
    if (res_sq < best || result.best_u.size() == 0) {
      best = std::min(best, res_sq);
      result.best_u = half;
    }
    x = project(run.feasible, x - gamma * r_half);
    const OracleCounter c = run.counters();
    result.records.push_back(
        {k, std::sqrt(res_sq), best, c.p_calls, c.q_calls, 0, false, seconds_since(start)});
    if (!x.allFinite()) {
      result.final_x = x;
      throw NumericError(k, std::move(result));
    }
  }
  result.final_x = std::move(x);
  return result;
}

double theorem_bound(double L_p, double dist0_sq, int K) {
  if (K < 1) throw std::invalid_argument("theorem_bound: K must be positive");
  return 16.0 * L_p * L_p * dist0_sq / static_cast<double>(K);
}

}  // namespace vislide
