#include "vislide/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vislide/errors.hpp"
#include "vislide/rng.hpp"

namespace vislide {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(u)) without overflow
double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

double sparse_dot(const SparseRow& row, const Vector& x) {
  double acc = 0.0;
  for (const auto& e : row) acc += e.value * x[e.index - 1];
  return acc;
}

void check_point(const AdversarialProblem& prob, const Vector& point) {
  if (point.size() != prob.dim())
    throw std::invalid_argument("adversarial point has dimension " +
                                std::to_string(point.size()) + ", expected " +
                                std::to_string(prob.dim()));
}

// x^T (A_i + y_i) for every row.
std::vector<double> margins(const AdversarialProblem& prob, const Vector& point) {
  const Index d = prob.features();
  const auto x = point.head(d);
  std::vector<double> t(prob.data.n_rows());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto y = point.segment(d * static_cast<Index>(i + 1), d);
    t[i] = sparse_dot(prob.data.rows[i], point) + x.dot(y);
  }
  return t;
}

// Assembles the saddle field from per-row loss derivatives c_i, where
// d loss_i / d x = c_i (A_i + y_i) and d loss_i / d y_i = c_i x.
Vector assemble_saddle(const AdversarialProblem& prob, const Vector& point,
                       const std::vector<double>& c) {
  const Index d = prob.features();
  const double inv_n = 1.0 / static_cast<double>(prob.samples());
  Vector out = Vector::Zero(prob.dim());
  auto gx = out.head(d);
  const auto x = point.head(d);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double w = c[i] * inv_n;
    const Index off = d * static_cast<Index>(i + 1);
    for (const auto& e : prob.data.rows[i]) gx[e.index - 1] += w * e.value;
    gx += w * point.segment(off, d);
    out.segment(off, d) = -w * x;
  }
  return out;
}

Vector regularizer_field(const AdversarialProblem& prob, const Vector& point) {
  const Index d = prob.features();
  Vector q(point.size());
  q.head(d) = prob.beta_x * point.head(d);
  q.tail(point.size() - d) = prob.beta_y * point.tail(point.size() - d);
  return q;
}

Vector logistic_p(const AdversarialProblem& prob, const Vector& point) {
  std::vector<double> c = margins(prob, point);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double b = prob.data.labels[i];
    c[i] = -b * sigmoid(-b * c[i]);
  }
  return assemble_saddle(prob, point, c);
}

Vector nllsq_p(const AdversarialProblem& prob, const Vector& point) {
  std::vector<double> c = margins(prob, point);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double s = sigmoid(c[i]);
    c[i] = -2.0 * (prob.data.labels[i] - s) * s * (1.0 - s);
  }
  return assemble_saddle(prob, point, c);
}

}  // namespace

SpdSample gen_spd_sample(Index d, double mu, double L, std::uint64_t seed) {
  if (d < 1) throw ConfigError("gen_spd: dimension must be positive");
  if (!(mu > 0.0)) throw ConfigError("gen_spd: mu must be positive");
  if (!(mu <= L)) throw ConfigError("gen_spd: mu must not exceed L");
  Rng rng(seed);
  Matrix g(d, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = normal(rng);
  const Matrix u = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector lambda = uniform_vector(d, mu, L, rng);
  const Matrix a = u.transpose() * lambda.asDiagonal() * u;
  return {0.5 * (a + a.transpose()), std::move(lambda)};
}

Matrix gen_spd(Index d, double mu, double L, std::uint64_t seed) {
  return gen_spd_sample(d, mu, L, seed).matrix;
}

Vector BilinearProblem::solution() const {
  Vector s(2 * half_dim());
  s << b_x, b_y;
  return s;
}

BilinearProblem make_bilinear(Index d, double mu, double L, std::uint64_t seed, double reg) {
  if (!(reg >= 0.0)) throw ConfigError("bilinear regularization must be nonnegative");
  BilinearProblem prob;
  prob.reg = reg;
  prob.A = gen_spd(d, mu, L, derive_seed(seed, 11));
  Rng rng(derive_seed(seed, 12));
  prob.b_x = uniform_vector(d, -1.0, 1.0, rng);
  prob.b_y = uniform_vector(d, -1.0, 1.0, rng);
  return prob;
}

OperatorPair bilinear_fields(std::shared_ptr<const BilinearProblem> prob) {
  const Index d = prob->half_dim();
  const LipschitzBounds bounds = lipschitz_bounds(*prob);
  OperatorHandle p(
      2 * d,
      [prob, d](const Vector& v) {
        Vector out(2 * d);
        out.head(d).noalias() = prob->A * (v.tail(d) - prob->b_y);
        out.tail(d).noalias() = -prob->A.transpose() * (v.head(d) - prob->b_x);
        return out;
      },
      bounds.p, true);
  OperatorHandle q(
      2 * d,
      [prob, d](const Vector& v) {
        Vector out(2 * d);
        out.head(d) = prob->reg * (v.head(d) - prob->b_x);
        out.tail(d) = prob->reg * (v.tail(d) - prob->b_y);
        return out;
      },
      bounds.q, true);
  return {std::move(p), std::move(q)};
}

double bilinear_objective(const BilinearProblem& prob, const Vector& point) {
  const Index d = prob.half_dim();
  const Vector dx = point.head(d) - prob.b_x;
  const Vector dy = point.tail(d) - prob.b_y;
  return dx.dot(prob.A * dy) + 0.5 * prob.reg * (dx.squaredNorm() - dy.squaredNorm());
}

CompositeVI bilinear_problem(std::shared_ptr<const BilinearProblem> prob, bool box) {
  const Index d = prob->half_dim();
  auto [p, q] = bilinear_fields(prob);
  CompositeVI vi{std::move(p), std::move(q),
                 box ? ConstraintSet::uniform_box(2 * d, -1.0, 1.0) : ConstraintSet::free(),
                 prob->solution()};
  vi.validate();
  return vi;
}

FieldValue logistic_field(const AdversarialProblem& prob, const Vector& point) {
  check_point(prob, point);
  return {logistic_p(prob, point), regularizer_field(prob, point)};
}

FieldValue nllsq_field(const AdversarialProblem& prob, const Vector& point) {
  check_point(prob, point);
  return {nllsq_p(prob, point), regularizer_field(prob, point)};
}

Vector adversarial_p(const AdversarialProblem& prob, const Vector& point) {
  check_point(prob, point);
  return prob.loss == AdversarialLoss::logistic ? logistic_p(prob, point) : nllsq_p(prob, point);
}

double adversarial_objective(const AdversarialProblem& prob, const Vector& point) {
  check_point(prob, point);
  const Index d = prob.features();
  const std::vector<double> t = margins(prob, point);
  double loss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double b = prob.data.labels[i];
    if (prob.loss == AdversarialLoss::logistic) {
      loss += softplus(-b * t[i]);
    } else {
      const double r = b - sigmoid(t[i]);
      loss += r * r;
    }
  }
  loss /= static_cast<double>(prob.samples());
  const double y_sq = point.tail(point.size() - d).squaredNorm();
  return loss + 0.5 * prob.beta_x * point.head(d).squaredNorm() - 0.5 * prob.beta_y * y_sq;
}

LipschitzBounds lipschitz_bounds(const BilinearProblem& prob) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(prob.A, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().cwiseAbs().maxCoeff(), prob.reg};
}

LipschitzBounds lipschitz_bounds(const AdversarialProblem& prob,
                                 const LipschitzEstimateOptions& options) {
  LipschitzBounds out;
  out.q = std::max(prob.beta_x, prob.beta_y);
  if (options.p_override) {
    out.p = *options.p_override;
    return out;
  }
  const Index d = prob.features();
  const ConstraintSet balls = ConstraintSet::block_balls(d, d, prob.samples(), prob.delta);
  auto rng = std::make_shared<Rng>(options.seed);
  auto draw = [&prob, d, &balls, rng]() {
    Vector v(prob.dim());
    v.head(d) = uniform_vector(d, -1.0, 1.0, *rng);
    v.tail(prob.dim() - d) = uniform_vector(prob.dim() - d, -prob.delta, prob.delta, *rng);
    return project(balls, v);
  };
  // Alternate far pairs with nearby pairs; the local ones probe the
  // Jacobian norm directly.
  auto flip = std::make_shared<bool>(false);
  PairSampler sampler = [&, rng, flip]() {
    Vector a = draw();
    *flip = !*flip;
    if (*flip) return std::make_pair(a, draw());
    Vector dir = gaussian_vector(a.size(), *rng);
    Vector b = project(balls, a + 1e-4 * dir / dir.norm());
    return std::make_pair(std::move(a), std::move(b));
  };
  OperatorHandle p(prob.dim(), [&prob](const Vector& v) { return adversarial_p(prob, v); });
  out.p = options.safety * estimate_lipschitz(p, sampler, options.trials);
  return out;
}

CompositeVI adversarial_problem(std::shared_ptr<const AdversarialProblem> prob, double L_p,
                                bool constrained) {
  if (prob->samples() == 0 || prob->features() == 0)
    throw ConfigError("adversarial problem needs a non-empty dataset");
  const Index dim = prob->dim();
  const Index d = prob->features();
  OperatorHandle p(
      dim, [prob](const Vector& v) { return adversarial_p(*prob, v); }, L_p,
      prob->loss == AdversarialLoss::logistic ? std::optional<bool>{} : std::optional<bool>{false});
  OperatorHandle q(
      dim, [prob](const Vector& v) { return regularizer_field(*prob, v); },
      std::max(prob->beta_x, prob->beta_y), true);
  CompositeVI vi{std::move(p), std::move(q),
                 constrained ? ConstraintSet::block_balls(d, d, prob->samples(), prob->delta)
                             : ConstraintSet::free(),
                 std::nullopt};
  vi.validate();
  return vi;
}

SparseDataset synthetic_binary_dataset(std::size_t rows, Index features, Index active,
                                       LabelScheme labels, std::uint64_t seed) {
  if (active < 0 || active > features) throw ConfigError("active count exceeds feature count");
  Rng rng(seed);
  SparseDataset ds;
  ds.n_features = features;
  std::vector<Index> cols(static_cast<std::size_t>(features));
  std::iota(cols.begin(), cols.end(), Index{1});
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < rows; ++r) {
    std::shuffle(cols.begin(), cols.end(), rng);
    std::vector<Index> pick(cols.begin(), cols.begin() + active);
    std::sort(pick.begin(), pick.end());
    SparseRow row;
    for (Index c : pick) row.push_back({c, 1.0});
    ds.rows.push_back(std::move(row));
    const bool positive = coin(rng);
    ds.labels.push_back(positive ? 1.0 : (labels == LabelScheme::plus_minus_one ? -1.0 : 0.0));
  }
  return ds;
}

SparseDataset synthetic_dense_dataset(std::size_t rows, Index features, LabelScheme labels,
                                      std::uint64_t seed) {
  Rng rng(seed);
  SparseDataset ds;
  ds.n_features = features;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < rows; ++r) {
    SparseRow row;
    for (Index c = 1; c <= features; ++c) row.push_back({c, normal(rng)});
    ds.rows.push_back(std::move(row));
    const bool positive = coin(rng);
    ds.labels.push_back(positive ? 1.0 : (labels == LabelScheme::plus_minus_one ? -1.0 : 0.0));
  }
  return ds;
}

}  // namespace vislide
