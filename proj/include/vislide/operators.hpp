#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace vislide {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

using Field = std::function<Vector(const Vector&)>;
using ScalarFn = std::function<double(const Vector&)>;

/// An evaluatable vector field R^d -> R^d with a per-handle call counter.
///
/// The evaluation function is shared and immutable; copying a handle copies
/// the counter value, so each run can own an independent copy.
class OperatorHandle {
 public:
  OperatorHandle() = default;
  OperatorHandle(Index dim, Field eval, std::optional<double> lipschitz_hint = std::nullopt,
                 std::optional<bool> monotone_hint = std::nullopt);

  /// Evaluates the field and increments the counter by one.
  Vector operator()(const Vector& x) const;

  Index dim() const noexcept { return dim_; }
  std::optional<double> lipschitz_hint() const noexcept { return lipschitz_; }
  std::optional<bool> monotone_hint() const noexcept { return monotone_; }
  std::uint64_t calls() const noexcept { return calls_; }
  void reset_calls() noexcept { calls_ = 0; }

  void set_lipschitz_hint(std::optional<double> value) { lipschitz_ = value; }

 private:
  Index dim_ = 0;
  std::shared_ptr<const Field> eval_;
  std::optional<double> lipschitz_;
  std::optional<bool> monotone_;
  mutable std::uint64_t calls_ = 0;
};

struct FreeSet {};

struct BoxSet {
  Vector lower;
  Vector upper;
};

/// Unconstrained prefix followed by equal-length blocks, each confined to a
/// Euclidean ball of the given radius.
struct BlockBallSet {
  Index total_dim = 0;
  Index prefix = 0;
  Index block_len = 0;
  std::vector<Index> block_starts;
  double radius = 0.0;
};

class ConstraintSet {
 public:
  using Variant = std::variant<FreeSet, BoxSet, BlockBallSet>;

  ConstraintSet() = default;

  static ConstraintSet free() { return ConstraintSet{}; }
  static ConstraintSet box(Vector lower, Vector upper);
  static ConstraintSet uniform_box(Index dim, double lower, double upper);
  static ConstraintSet block_balls(Index prefix, Index block_len, Index n_blocks, double radius);
  /// Validates an explicit block layout; overlapping, gapped or
  /// non-covering layouts raise ConfigError.
  static ConstraintSet block_balls(Index prefix, Index block_len, std::vector<Index> block_starts,
                                   double radius);

  bool is_free() const noexcept { return std::holds_alternative<FreeSet>(set_); }
  /// Dimension the set applies to; empty for Free.
  std::optional<Index> dim() const;
  const Variant& variant() const noexcept { return set_; }

 private:
  explicit ConstraintSet(Variant v) : set_(std::move(v)) {}
  Variant set_{FreeSet{}};
};

/// Euclidean projection onto the set.
Vector project(const ConstraintSet& set, const Vector& x);

struct OracleCounter {
  std::uint64_t p_calls = 0;
  std::uint64_t q_calls = 0;
};

/// The composite problem R(x) = P(x) + Q(x).
struct CompositeVI {
  OperatorHandle p;
  OperatorHandle q;
  ConstraintSet feasible;
  std::optional<Vector> known_solution;

  Index dim() const noexcept { return p.dim(); }
  OracleCounter counters() const noexcept { return {p.calls(), q.calls()}; }
  void reset_counters() noexcept {
    p.reset_calls();
    q.reset_calls();
  }
  /// Throws ConfigError when the pieces disagree on dimension.
  void validate() const;
};

/// P(x) + Q(x); one call to each operator.
Vector eval_R(const CompositeVI& problem, const Vector& x);

using PairSampler = std::function<std::pair<Vector, Vector>()>;

/// Independent point pairs drawn uniformly from [lower, upper]^dim.
PairSampler uniform_pair_sampler(Index dim, double lower, double upper, std::uint64_t seed);

/// Min over sampled pairs of <F(a)-F(b), a-b> / |a-b|^2. Coincident pairs
/// are skipped; throws std::runtime_error if every pair was skipped.
double probe_monotonicity(const OperatorHandle& op, const PairSampler& sampler, int trials);

/// Max over sampled pairs of |F(a)-F(b)| / |a-b|; a lower bound on the
/// Lipschitz constant.
double estimate_lipschitz(const OperatorHandle& op, const PairSampler& sampler, int trials);

/// Min over sampled points of <R(x), x - x*> / |x - x*|^2, using the first
/// point of each pair. Requires problem.known_solution.
double probe_minty(const CompositeVI& problem, const PairSampler& sampler, int trials);

/// Coordinate split of a saddle variable: the first `min_len` entries are
/// minimized, the remaining `max_len` maximized.
struct SaddleSplit {
  Index min_len = 0;
  Index max_len = 0;
};

/// Central-difference gradient of f with the maximized block negated.
Vector finite_difference_field(const ScalarFn& f, SaddleSplit split, const Vector& x,
                               double h = 1e-6);

}  // namespace vislide
