#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nhcz/ball_index.hpp"
#include "nhcz/mspace.hpp"

namespace nhcz {

/// Closed ball B(center, radius), radius > 0. Dilations keep the center.
struct Ball {
  PointIndex center = 0;
  double radius = 1.0;

  Ball dilate(double factor) const { return {center, radius * factor}; }
  friend bool operator==(const Ball&, const Ball&) = default;
};

std::vector<PointIndex> ball_members(const DiscreteSpace& space, const Ball& b);
double ball_measure(const DiscreteSpace& space, const Ball& b);
/// Member-set inclusion of inner in outer.
bool ball_subset(const DiscreteSpace& space, const Ball& inner, const Ball& outer);
bool balls_intersect(const DiscreteSpace& space, const Ball& a, const Ball& b);

/// 1 + max{C_lambda^(3 log2 6), 6^(3n)} with n the doubling order of lambda.
double default_beta0(const DominatingFunction& lambda);

/// (alpha, beta) doubling parameters plus the fixed threshold beta0 used by the
/// "doubling ball" convention, B-tilde and the doubling maximal operator.
struct DoublingParams {
  double alpha = 6.0;
  double beta = 217.0;
  double beta0 = 217.0;

  /// alpha = 6 and beta = beta0 = default_beta0(lambda).
  static DoublingParams standard(const DominatingFunction& lambda);
  /// Throws ParameterError unless alpha, beta > 1 and beta0 exceeds its lower bound.
  void check(const DominatingFunction& lambda) const;
};

/// mu(alpha B) <= beta mu(B); vacuously true when mu(B) = 0.
bool is_doubling(const DiscreteSpace& space, const DominatingFunction& lambda, const Ball& b,
                 const DoublingParams& params);

/// alpha^j B for the smallest j >= 0 that is (alpha, beta)-doubling.
/// Requires beta > C_lambda^(log2 alpha).
Ball smallest_doubling_up(const DiscreteSpace& space, const DominatingFunction& lambda, const Ball& b,
                          const DoublingParams& params);

/// Largest alpha^-j B (j >= 0, radius >= epsilon_min) that is (alpha, beta)-doubling.
/// Requires beta > alpha^n with n the doubling order of lambda.
std::optional<Ball> largest_doubling_down(const DiscreteSpace& space, const DominatingFunction& lambda,
                                          const Ball& b, const DoublingParams& params);

/// B-tilde: the smallest (6, beta0)-doubling dilate 6^N B.
Ball doubling_hull(const DiscreteSpace& space, const DominatingFunction& lambda, const Ball& b, double beta0);

struct CoefficientReport {
  double value = 1.0;
  /// N_{B,Q}: smallest integer with 6^N r_B >= r_Q.
  std::size_t n_bq = 0;
  /// (point, contribution) for K; (k, contribution) for K'.
  std::vector<std::pair<std::size_t, double>> terms;
  /// K / K' when lambda is homogeneous (filled by coefficient_Kprime only).
  std::optional<double> k_over_kprime;
};

/// K_{B,Q} = 1 + sum over r_B <= d(x, x_B) <= r_Q of mass(x) / lambda(x_B, d(x, x_B)).
/// Throws ArgumentError unless B is a subset of Q as point sets.
CoefficientReport coefficient_K(const DiscreteSpace& space, const DominatingFunction& lambda, const Ball& b,
                                const Ball& q);

/// K'_{B,Q} = 1 + sum_{k=1}^{N_{B,Q}} mu(6^k B) / lambda(x_B, 6^k r_B).
CoefficientReport coefficient_Kprime(const DiscreteSpace& space, const DominatingFunction& lambda,
                                     const Ball& b, const Ball& q);

// Whole-universe versions over the candidate balls of a BallIndex.

/// Ball of a candidate id as a value.
inline Ball to_ball(const BallIndex& index, BallId id) { return {index.center_of(id), index.radius(id)}; }

/// (alpha, beta)-doubling flag of every candidate ball.
std::vector<char> doubling_flags(const BallIndex& index, double alpha, double beta);

/// For every candidate ball B, the candidate ball with the member set of B-tilde.
/// The returned ball is itself (6, beta0)-doubling.
std::vector<BallId> doubling_hulls(const BallIndex& index, double beta0);

/// max K_{Q, alpha^N Q} over candidate balls Q whose dilates alpha Q, ..., alpha^{N-1} Q
/// are all non-(alpha, beta)-doubling (N >= 1 maximal before saturation).
struct NonDoublingRunReport {
  double max_k = 1.0;
  Ball witness;
  std::size_t witness_run = 0;
};
NonDoublingRunReport non_doubling_run_constant(const BallIndex& index, double alpha, double beta);

/// max K_{Q,R} over concentric candidate pairs with r_Q <= r_R <= ratio_bound * r_Q.
double compatible_size_constant(const BallIndex& index, double ratio_bound);

}  // namespace nhcz
