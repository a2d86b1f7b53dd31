#pragma once

#include <span>
#include <string>
#include <vector>

#include "nhcz/ball_index.hpp"
#include "nhcz/balls.hpp"
#include "nhcz/mspace.hpp"
#include "nhcz/pairs.hpp"
#include "nhcz/report.hpp"

namespace nhcz {

enum class MaximalKind { Noncentered, Doubling, Sharp, Power };

std::string to_string(MaximalKind kind);

struct MaximalResult {
  MaximalKind kind = MaximalKind::Noncentered;
  FunctionOnSpace values;
  /// Per point, a candidate ball containing it that attains the supremum.
  std::vector<Ball> witness;
  /// False when the pair supremum of the sharp operator was sampled.
  bool exact = true;

  // Sharp operator only: the single-ball and the pair supremum separately.
  FunctionOnSpace first_term;
  FunctionOnSpace second_term;
  std::size_t pair_total = 0;
  std::size_t pair_visited = 0;
};

/// M_(rho) f(x) = sup over Q containing x of (integral_Q |f|) / mu(rho Q).
MaximalResult maximal_noncentered(const BallIndex& index, std::span<const double> f, double rho);
MaximalResult maximal_noncentered(const DiscreteSpace& space, const DominatingFunction& lambda,
                                  std::span<const double> f, double rho);

/// N f(x): the average of |f| over (6, beta0)-doubling balls Q containing x, maximized.
MaximalResult maximal_doubling(const BallIndex& index, std::span<const double> f, const DoublingParams& params);
MaximalResult maximal_doubling(const DiscreteSpace& space, const DominatingFunction& lambda,
                               std::span<const double> f, const DoublingParams& params);

/// M^# f(x) = sup_{B ni x} (1 / mu(6B)) integral_B |f - m_{B~} f|
///          + sup over doubling Q subset R with x in Q of |m_Q f - m_R f| / K_{Q,R}.
MaximalResult sharp_maximal(const BallIndex& index, std::span<const double> f, const DoublingParams& params,
                            const PairScanOptions& pairs = {});
MaximalResult sharp_maximal(const DiscreteSpace& space, const DominatingFunction& lambda,
                            std::span<const double> f, const DoublingParams& params,
                            const PairScanOptions& pairs = {});

/// M_{p,rho} f(x) = sup over Q containing x of ((integral_Q |f|^p) / mu(rho Q))^(1/p), p >= 1.
MaximalResult maximal_p(const BallIndex& index, std::span<const double> f, double p, double rho);
MaximalResult maximal_p(const DiscreteSpace& space, const DominatingFunction& lambda, std::span<const double> f,
                        double p, double rho);

/// As maximal_p for any exponent p > 0 (used with p < 1 on the operator side).
MaximalResult maximal_power(const BallIndex& index, std::span<const double> f, double p, double rho);

/// ||f||_{L^p(mu)}; p = infinity gives the max of |f| over positive-mass points.
double lp_norm(const DiscreteSpace& space, std::span<const double> f, double p);

/// mu{x : values(x) > level}.
double level_set_measure(const DiscreteSpace& space, std::span<const double> values, double level);

struct GoodLambdaParams {
  double epsilon = 1.0;
  double delta = 0.01;
  double nu = 0.5;
  std::vector<double> lambdas;
};

/// For every level t of the grid: mu{N f > (1 + eps) t, M^# f <= delta t} against
/// nu mu{N f > t}, with the best nu per level. Requires integral f = 0.
CheckReport good_lambda_check(const BallIndex& index, std::span<const double> f, const GoodLambdaParams& params,
                              const DoublingParams& doubling, const PairScanOptions& pairs = {});

/// t mu{M_(rho) f > t} <= ||f||_1 on every level of the grid, with rho the Vitali
/// dilation of the space (5 on metric spaces).
CheckReport maximal_weak11_check(const BallIndex& index, std::span<const double> f, std::span<const double> levels);

/// Sixteen levels spread geometrically over the range of a nonnegative function.
std::vector<double> level_grid(std::span<const double> values, std::size_t count = 16);

}  // namespace nhcz
