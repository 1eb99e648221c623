#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "vislide/data.hpp"
#include "vislide/operators.hpp"

namespace vislide {

struct SpdSample {
  Matrix matrix;
  Vector eigenvalues;
};

/// Random symmetric positive definite matrix U^T diag(lambda) U with U from
/// the QR factorization of a Gaussian matrix and lambda ~ U[mu, L].
/// Deterministic per seed.
SpdSample gen_spd_sample(Index d, double mu, double L, std::uint64_t seed);
Matrix gen_spd(Index d, double mu, double L, std::uint64_t seed);

/// Saddle problem min_x max_y (x-b_x)^T A (y-b_y) + reg/2 |x-b_x|^2 - reg/2 |y-b_y|^2.
/// reg = 1 is the standard instance; larger values make Q the stiff part.
struct BilinearProblem {
  Matrix A;
  Vector b_x;
  Vector b_y;
  double reg = 1.0;

  Index half_dim() const noexcept { return b_x.size(); }
  Vector solution() const;
};

/// A from gen_spd, b_x and b_y per-coordinate U(-1, 1); both derived from
/// `seed` through independent streams.
BilinearProblem make_bilinear(Index d, double mu, double L, std::uint64_t seed, double reg = 1.0);

struct OperatorPair {
  OperatorHandle p;
  OperatorHandle q;
};

/// P(x,y) = (A(y-b_y), -A^T(x-b_x)), Q(x,y) = reg (x-b_x, y-b_y).
OperatorPair bilinear_fields(std::shared_ptr<const BilinearProblem> prob);

double bilinear_objective(const BilinearProblem& prob, const Vector& point);

/// Composite instance with known solution (b_x, b_y). `box` restricts both
/// blocks to [-1, 1].
CompositeVI bilinear_problem(std::shared_ptr<const BilinearProblem> prob, bool box = false);

enum class AdversarialLoss { logistic, nllsq };

/// Training with per-sample adversarial noise:
///   min_x max_{|y_i| <= delta} (1/N) sum_i loss_i(x, y_i)
///                               + beta_x/2 |x|^2 - beta_y/2 |y|^2
/// Point layout is x (d entries) followed by y_1..y_N (d entries each).
/// Logistic expects labels in {-1, +1}; NLLSQ expects labels in {0, 1}.
struct AdversarialProblem {
  AdversarialLoss loss = AdversarialLoss::logistic;
  SparseDataset data;
  double beta_x = 0.1;
  double beta_y = 0.1;
  double delta = 0.1;

  Index features() const noexcept { return data.n_features; }
  Index samples() const noexcept { return static_cast<Index>(data.n_rows()); }
  Index dim() const noexcept { return features() * (1 + samples()); }
};

struct FieldValue {
  Vector p;
  Vector q;
};

FieldValue logistic_field(const AdversarialProblem& prob, const Vector& point);
FieldValue nllsq_field(const AdversarialProblem& prob, const Vector& point);

/// Data-loss part of the saddle field for prob.loss.
Vector adversarial_p(const AdversarialProblem& prob, const Vector& point);

double adversarial_objective(const AdversarialProblem& prob, const Vector& point);

struct LipschitzBounds {
  double p = 0.0;
  double q = 0.0;
};

struct LipschitzEstimateOptions {
  int trials = 200;
  double safety = 1.5;
  std::uint64_t seed = 0;
  std::optional<double> p_override;
};

/// (sigma_max(A), reg).
LipschitzBounds lipschitz_bounds(const BilinearProblem& prob);

/// L_q = max(beta_x, beta_y); L_p is a sampled estimate over x in [-1,1]^d
/// and y_i in the delta-balls, times the safety factor, unless overridden.
LipschitzBounds lipschitz_bounds(const AdversarialProblem& prob,
                                 const LipschitzEstimateOptions& options = {});

/// Composite instance; with `constrained` each y_i is kept in its
/// delta-ball. `L_p` becomes the P handle's Lipschitz hint.
CompositeVI adversarial_problem(std::shared_ptr<const AdversarialProblem> prob, double L_p,
                                bool constrained = true);

/// Random dataset shaped like one-hot categorical data: each row has
/// `active` ones among `features` columns, labels taken from `labels`.
SparseDataset synthetic_binary_dataset(std::size_t rows, Index features, Index active,
                                       LabelScheme labels, std::uint64_t seed);

/// Dense Gaussian-feature dataset for small gradient checks.
SparseDataset synthetic_dense_dataset(std::size_t rows, Index features, LabelScheme labels,
                                      std::uint64_t seed);

}  // namespace vislide
