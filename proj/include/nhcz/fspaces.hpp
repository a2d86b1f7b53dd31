#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhcz/ball_index.hpp"
#include "nhcz/balls.hpp"
#include "nhcz/czdecomp.hpp"
#include "nhcz/czop.hpp"
#include "nhcz/pairs.hpp"
#include "nhcz/report.hpp"

namespace nhcz {

/// m_{B~} f for every candidate ball (0 on zero-mass hulls).
std::vector<double> canonical_ball_values(const BallIndex& index, std::span<const double> f, double beta0);

struct RBMOEstimate {
  /// Oscillation characterization with the ball's own mean:
  /// max of sup_B (1 / mu(6B)) int_B |f - m_B f| and
  /// sup_{Q subset R} |m_Q f - m_R f| / (K_{Q,R} (mu(6Q) / mu(Q) + mu(6R) / mu(R))).
  double c_b = 0.0;
  double c_b_single = 0.0;
  double c_b_pair = 0.0;
  /// Doubling balls only: max of sup (1 / mu(B)) int_B |f - m_B f| and sup |m_Q f - m_R f| / K_{Q,R}.
  double c_c = 0.0;
  double c_c_single = 0.0;
  double c_c_pair = 0.0;
  /// Collection of numbers f_B = m_{B~} f with rho = 6: max of
  /// sup_B (1 / mu(6B)) int_B |f - f_B| and sup_{B subset B1} |f_B - f_B1| / K_{B,B1}.
  double c_canonical = 0.0;
  double c_canonical_single = 0.0;
  double c_canonical_pair = 0.0;

  Ball witness_ball;
  Ball witness_q;
  Ball witness_r;
  /// False when any pair supremum was sampled.
  bool exact = true;
  std::size_t pairs_total = 0;
  std::size_t pairs_visited = 0;

  /// The norm estimate used by ratio checks (c_b).
  double norm() const { return c_b; }
  nlohmann::json to_json() const;
};

RBMOEstimate rbmo_estimate(const BallIndex& index, std::span<const double> f, const DoublingParams& params,
                           const PairScanOptions& pairs = {});
RBMOEstimate rbmo_estimate(const DiscreteSpace& space, const DominatingFunction& lambda, std::span<const double> f,
                           const DoublingParams& params, const PairScanOptions& pairs = {});
/// Sum of the c_b estimates of the real and imaginary parts.
double rbmo_norm_complex(const BallIndex& index, std::span<const Complex> f, const DoublingParams& params,
                         const PairScanOptions& pairs = {});

/// sup over balls B0 of ((1 / mu(rho B0)) int_{B0} |f - m_{B0~} f|^p)^(1/p), divided by c_canonical.
CheckReport john_nirenberg_check(const BallIndex& index, std::span<const double> f, double p, double rho,
                                 const DoublingParams& params, const PairScanOptions& pairs = {});

struct AtomTerm {
  double coefficient = 0.0;
  Ball ball;
  FunctionOnSpace atom;
};

struct AtomicBlock {
  Ball host;
  std::vector<AtomTerm> terms;
  /// Size condition in L^infinity (true) or in L^p.
  bool infinity = true;
  double p = 2.0;
  double rho = 6.0;

  /// sum_j coefficient_j a_j.
  FunctionOnSpace value(std::size_t point_count) const;
  nlohmann::json to_json() const;
  static AtomicBlock from_json(const nlohmann::json& j);
};

struct BlockValidation {
  bool valid = true;
  /// |b|_H = sum_j |coefficient_j| (reported also when invalid).
  double norm = 0.0;
  std::vector<std::string> failures;
  /// Term index of the first violated size bound and its relative excess.
  std::size_t violating_term = 0;
  double margin = 0.0;
};

/// Checks support, mean zero, sub-ball inclusion and the size bounds
/// ||a_j||_inf <= (mu(rho B_j) K_{B_j,B})^-1 or ||a_j||_p <= mu(rho B_j)^(1/p - 1) K_{B_j,B}^-1.
BlockValidation atomic_block_validate(const DiscreteSpace& space, const DominatingFunction& lambda,
                                      const AtomicBlock& block);

/// The bad block b_i = f omega_i - phi_i with host R_i, as terms on (dilation Q_i) and R_i
/// scaled so that each size bound holds with equality.
AtomicBlock cz_atomic_block(const BallIndex& index, std::span<const double> f, const CZDecomposition& dec,
                            std::size_t i);

struct HardyFromCZ {
  CZDecomposition decomposition;
  std::vector<AtomicBlock> blocks;
  double norm_upper = 0.0;
};

/// Decomposes f at height lambda and returns the bad part as atomic blocks. Requires int f = 0.
HardyFromCZ hardy_from_cz(const BallIndex& index, std::span<const double> f, double lambda, double p,
                          const DoublingParams& params);

/// |int b g| / (|b|_H * c_b(g)).
CheckReport duality_pairing_check(const BallIndex& index, const AtomicBlock& block, std::span<const double> g,
                                  const DoublingParams& params, const PairScanOptions& pairs = {});
/// As above with a precomputed estimate of g.
CheckReport duality_pairing_check(const DiscreteSpace& space, const AtomicBlock& block, std::span<const double> g,
                                  const RBMOEstimate& g_estimate);

/// sum_i K_{B_i,B_i+1} <= 2 K_{B_1,B_m} on every maximal run of consecutive K > 2.
CheckReport chain_inequality_check(const BallIndex& index, PointIndex center, std::span<const double> radii);

/// M^#([b,T] f)(x) / (c_b(b) (M_{p,5} f + M_{p,6} T f + T_* f)(x)), maximized.
CheckReport commutator_pointwise_check(const BallIndex& index, const Kernel& kernel, std::span<const double> b,
                                       std::span<const double> f, double p, const DoublingParams& params,
                                       const PairScanOptions& pairs = {});

/// RBMO estimate of T f over ||f||_inf.
CheckReport rbmo_image_check(const BallIndex& index, const Kernel& kernel, std::span<const double> f,
                             const DoublingParams& params, const PairScanOptions& pairs = {});

/// ||T b||_1 / |b|_H for an atomic block.
CheckReport hardy_l1_check(const DiscreteSpace& space, const DominatingFunction& lambda, const Kernel& kernel,
                           const AtomicBlock& block);

}  // namespace nhcz
