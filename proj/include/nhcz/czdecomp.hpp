#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "nhcz/ball_index.hpp"
#include "nhcz/balls.hpp"
#include "nhcz/report.hpp"

namespace nhcz {

/// Dilation of the doubling hulls R_i and of the stopping-time threshold balls.
inline constexpr double kHullDilation = 108.0;
/// Dilation 6^2 in the stopping-time average.
inline constexpr double kStopDilation = 36.0;

struct CZBlock {
  /// Q_i from the stopping-time selection.
  Ball q;
  /// R_i = 108^steps Q_i, the first (108, C_lambda^(log2 108 + 1))-doubling ball of that family.
  Ball r;
  std::size_t steps = 1;
  /// phi_i = alpha * indicator(A), A inside R_i (ascending point indices).
  double alpha = 0.0;
  std::vector<PointIndex> a;
  /// Some earlier R_j met R_i when phi_i was built.
  bool overlapped = false;
};

struct CZDecomposition {
  double lambda = 1.0;
  double p = 1.0;
  double beta0 = 217.0;
  /// Dilation of the finite-overlap cover (6 on metric spaces); omega_i lives on dilation * Q_i.
  double dilation = 6.0;
  /// Blocks in selection order.
  std::vector<CZBlock> blocks;
  /// Order in which phi_i were built (R_i radius ascending, ties by block index).
  std::vector<std::size_t> order;
  double c1 = 0.0;
  double c2 = 0.0;
  double kappa = 0.0;
  FunctionOnSpace g;
};

/// omega_i = indicator(dilation Q_i) / sum_k indicator(dilation Q_k).
FunctionOnSpace cz_omega(const DiscreteSpace& space, const CZDecomposition& dec, std::size_t i);
FunctionOnSpace cz_phi(const DiscreteSpace& space, const CZDecomposition& dec, std::size_t i);
/// b_i = f omega_i - phi_i.
FunctionOnSpace cz_bad_block(const DiscreteSpace& space, std::span<const double> f, const CZDecomposition& dec,
                             std::size_t i);

/// Calderon-Zygmund decomposition of f at height lambda.
/// Requires lambda^p > beta0 ||f||_p^p / ||mu||.
CZDecomposition cz_decompose(const BallIndex& index, std::span<const double> f, double lambda, double p,
                             const DoublingParams& params);
CZDecomposition cz_decompose(const DiscreteSpace& space, const DominatingFunction& lambda_fn,
                             std::span<const double> f, double lambda, double p, const DoublingParams& params);

/// Re-derives every postcondition from the decomposition alone.
CheckReport verify_cz(const BallIndex& index, std::span<const double> f, const CZDecomposition& dec);

nlohmann::json to_json(const CZDecomposition& dec);
CZDecomposition cz_from_json(const nlohmann::json& j);

}  // namespace nhcz
