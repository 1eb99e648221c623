#include "vislide/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vislide/errors.hpp"
#include "vislide/rng.hpp"

namespace vislide {

OperatorHandle::OperatorHandle(Index dim, Field eval, std::optional<double> lipschitz_hint,
                               std::optional<bool> monotone_hint)
    : dim_(dim),
      eval_(std::make_shared<const Field>(std::move(eval))),
      lipschitz_(lipschitz_hint),
      monotone_(monotone_hint) {
  if (dim <= 0) throw ConfigError("operator dimension must be positive");
  if (!*eval_) throw ConfigError("operator has no evaluation function");
  if (lipschitz_hint && !(*lipschitz_hint >= 0.0))
    throw ConfigError("lipschitz hint must be nonnegative");
}

Vector OperatorHandle::operator()(const Vector& x) const {
  if (!eval_) throw std::logic_error("evaluating an empty operator handle");
  if (x.size() != dim_)
    throw std::invalid_argument("operator expects dimension " + std::to_string(dim_) + ", got " +
                                std::to_string(x.size()));
  ++calls_;
  Vector out = (*eval_)(x);
  if (out.size() != dim_) throw std::logic_error("operator changed the dimension of its input");
  return out;
}

ConstraintSet ConstraintSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw ConfigError("box bounds differ in length");
  if ((lower.array() > upper.array()).any()) throw ConfigError("box lower bound exceeds upper");
  return ConstraintSet(BoxSet{std::move(lower), std::move(upper)});
}

ConstraintSet ConstraintSet::uniform_box(Index dim, double lower, double upper) {
  return box(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
}

ConstraintSet ConstraintSet::block_balls(Index prefix, Index block_len, Index n_blocks,
                                         double radius) {
  if (n_blocks < 0) throw ConfigError("negative block count");
  std::vector<Index> starts(static_cast<std::size_t>(n_blocks));
  for (Index i = 0; i < n_blocks; ++i) starts[static_cast<std::size_t>(i)] = prefix + i * block_len;
  return block_balls(prefix, block_len, std::move(starts), radius);
}

ConstraintSet ConstraintSet::block_balls(Index prefix, Index block_len,
                                         std::vector<Index> block_starts, double radius) {
  if (prefix < 0) throw ConfigError("negative unconstrained prefix");
  if (block_len <= 0) throw ConfigError("block length must be positive");
  if (!(radius >= 0.0)) throw ConfigError("ball radius must be nonnegative");
  Index expected = prefix;
  for (Index start : block_starts) {
    if (start < expected) throw ConfigError("ball blocks overlap");
    if (start > expected) throw ConfigError("ball blocks leave a gap");
    expected = start + block_len;
  }
  return ConstraintSet(BlockBallSet{expected, prefix, block_len, std::move(block_starts), radius});
}

std::optional<Index> ConstraintSet::dim() const {
  if (const auto* b = std::get_if<BoxSet>(&set_)) return b->lower.size();
  if (const auto* b = std::get_if<BlockBallSet>(&set_)) return b->total_dim;
  return std::nullopt;
}

Vector project(const ConstraintSet& set, const Vector& x) {
  if (auto d = set.dim(); d && *d != x.size())
    throw std::invalid_argument("projection dimension mismatch");
  const auto& v = set.variant();
  if (const auto* box = std::get_if<BoxSet>(&v)) return x.cwiseMax(box->lower).cwiseMin(box->upper);
  if (const auto* balls = std::get_if<BlockBallSet>(&v)) {
    Vector out = x;
    for (Index start : balls->block_starts) {
      auto block = out.segment(start, balls->block_len);
      const double norm = block.norm();
      if (norm > balls->radius) block *= balls->radius / norm;
    }
    return out;
  }
  return x;
}

void CompositeVI::validate() const {
  if (p.dim() <= 0 || q.dim() <= 0) throw ConfigError("problem operators are not set");
  if (p.dim() != q.dim()) throw ConfigError("P and Q disagree on dimension");
  if (auto d = feasible.dim(); d && *d != p.dim())
    throw ConfigError("feasible set dimension does not match the operators");
  if (known_solution && known_solution->size() != p.dim())
    throw ConfigError("known solution has the wrong dimension");
}

Vector eval_R(const CompositeVI& problem, const Vector& x) {
  if (x.size() != problem.dim())
    throw std::invalid_argument("eval_R: point dimension does not match the problem");
  return problem.p(x) + problem.q(x);
}

PairSampler uniform_pair_sampler(Index dim, double lower, double upper, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [=]() {
    Vector a = uniform_vector(dim, lower, upper, *rng);
    Vector b = uniform_vector(dim, lower, upper, *rng);
    return std::make_pair(std::move(a), std::move(b));
  };
}

namespace {

template <typename Visit>
void for_each_pair(const PairSampler& sampler, int trials, Visit&& visit) {
  if (trials < 1) throw std::invalid_argument("probe needs at least one trial");
  int used = 0;
  for (int t = 0; t < trials; ++t) {
    auto [a, b] = sampler();
    const Vector diff = a - b;
    const double dist_sq = diff.squaredNorm();
    if (dist_sq == 0.0) continue;
    visit(a, b, diff, dist_sq);
    ++used;
  }
  if (used == 0) throw std::runtime_error("probe: every sampled pair was coincident");
}

}  // namespace

double probe_monotonicity(const OperatorHandle& op, const PairSampler& sampler, int trials) {
  double worst = std::numeric_limits<double>::infinity();
  for_each_pair(sampler, trials, [&](const Vector& a, const Vector& b, const Vector& diff,
                                     double dist_sq) {
    worst = std::min(worst, (op(a) - op(b)).dot(diff) / dist_sq);
  });
  return worst;
}

double estimate_lipschitz(const OperatorHandle& op, const PairSampler& sampler, int trials) {
  double best = 0.0;
  for_each_pair(sampler, trials, [&](const Vector& a, const Vector& b, const Vector& diff,
                                     double dist_sq) {
    best = std::max(best, (op(a) - op(b)).norm() / std::sqrt(dist_sq));
    (void)diff;
  });
  return best;
}

double probe_minty(const CompositeVI& problem, const PairSampler& sampler, int trials) {
  if (!problem.known_solution) throw std::invalid_argument("probe_minty needs a known solution");
  if (trials < 1) throw std::invalid_argument("probe needs at least one trial");
  const Vector& star = *problem.known_solution;
  double worst = std::numeric_limits<double>::infinity();
  int used = 0;
  for (int t = 0; t < trials; ++t) {
    const Vector x = sampler().first;
    const Vector diff = x - star;
    const double dist_sq = diff.squaredNorm();
    if (dist_sq == 0.0) continue;
    worst = std::min(worst, eval_R(problem, x).dot(diff) / dist_sq);
    ++used;
  }
  if (used == 0) throw std::runtime_error("probe: every sampled point was the solution");
  return worst;
}

Vector finite_difference_field(const ScalarFn& f, SaddleSplit split, const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  if (split.min_len < 0 || split.max_len < 0 || split.min_len + split.max_len != x.size())
    throw std::invalid_argument("saddle split does not match the point dimension");
  Vector grad(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double up = f(probe);
    probe[i] = xi - h;
    const double down = f(probe);
    probe[i] = xi;
    grad[i] = (up - down) / (2.0 * h);
  }
  grad.tail(split.max_len) *= -1.0;
  return grad;
}

}  // namespace vislide
