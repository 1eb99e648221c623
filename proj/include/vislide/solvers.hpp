#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vislide/operators.hpp"

namespace vislide {

enum class InnerMethod { eg, eag };

/// Inner solver for the strongly monotone subproblem B(u) = 0.
struct InnerConfig {
  InnerMethod method = InnerMethod::eg;
  int max_inner = 10000;
  /// Absolute floor on |B(u)|; defaults to 1e-12 * L_p * max(1, |x_k|).
  std::optional<double> abs_tol;
  /// Defaults to 1 / (2 L_B) with L_B = L_q + 1/theta.
  std::optional<double> eg_step;
  /// Defaults to 1 / (8 L_B).
  std::optional<double> eag_step;
  /// Run exactly this many inner steps instead of stopping on the
  /// inexactness criterion.
  std::optional<int> fixed_budget;
};

struct SlidingParams {
  double L_p = 1.0;
  /// Defaults to 1 / (2 L_p).
  std::optional<double> theta;
  /// Defaults to theta / 2.
  std::optional<double> eta;
  int K = 1;
  InnerConfig inner;
  Vector x0;
  /// Falls back to the Q handle's Lipschitz hint.
  std::optional<double> L_q;

  double resolved_theta() const;
  double resolved_eta() const;
};

struct IterateRecord {
  int k = 0;
  double residual_norm = 0.0;
  double best_residual_sq = 0.0;
  std::uint64_t p_calls = 0;
  std::uint64_t q_calls = 0;
  int inner_iters = 0;
  /// Inner solve ran out of budget without certifying the inexactness bound.
  bool inner_flag = false;
  double elapsed = 0.0;
};

struct RunResult {
  std::vector<IterateRecord> records;
  Vector final_x;
  Vector best_u;
  std::string config;
  std::uint64_t seed = 0;

  bool any_inner_flag() const;
};

/// Raised when an iterate stops being finite; `partial` holds every record
/// completed before the failure.
class NumericError : public std::runtime_error {
 public:
  NumericError(int iteration, RunResult partial);
  int iteration() const noexcept { return iteration_; }
  const RunResult& partial() const noexcept { return partial_; }

 private:
  int iteration_;
  RunResult partial_;
};

/// B(u) = P(x_k) + Q(u) + (u - x_k) / theta, with P(x_k) cached.
Vector b_operator(const CompositeVI& problem, const Vector& x_k, const Vector& P_xk, double theta,
                  const Vector& u);

/// Computable sufficient condition for |B(u)|^2 <= L_p^2/3 |x_k - u*|^2,
/// where u* is the exact subproblem solution. Strong monotonicity of B
/// gives |u - u*| <= theta |B(u)|, so
///   (1 + theta L_p / sqrt 3) |B(u)| <= (L_p / sqrt 3) |x_k - u|
/// is enough. `b_norm <= abs_tol` is accepted unconditionally.
bool check_inexact(double b_norm, double dist, double L_p, double theta, double abs_tol);

struct InnerResult {
  Vector u;
  int iters = 0;
  bool certified = false;
};

/// Approximately solves B(u) = 0 starting from u = x_k.
InnerResult inner_solve(const CompositeVI& problem, const Vector& x_k, const Vector& P_xk,
                        const SlidingParams& params);

/// Extragradient sliding: per outer step one P call at x_k for the
/// subproblem and one at u_k for the update x_{k+1} = x_k - eta R(u_k).
RunResult sliding_solve(const CompositeVI& problem, const SlidingParams& params);

/// Default baseline step 1 / (2 (L_p + L_q)).
double default_extragradient_step(double L_p, double L_q);

/// Classical extragradient; reports |R| at the extrapolated point.
RunResult extragradient_solve(const CompositeVI& problem, double gamma, int K, const Vector& x0);

/// 16 L_p^2 |x0 - x*|^2 / K.
double theorem_bound(double L_p, double dist0_sq, int K);

}  // namespace vislide
