#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nhcz/mspace.hpp"

namespace nhcz {

/// Flat identifier of a candidate ball (center, rank into candidate_radii(center)).
using BallId = std::size_t;

/// The finite universe of candidate balls of a space.
///
/// Every closed ball B(c, r) coincides as a point set with the candidate ball
/// (c, snap(c, r)), and the dilate of the snapped ball is contained in the
/// dilate of the original. Per center, points are kept sorted by distance
/// (ties by index) so that every candidate ball is a prefix of that order and
/// measures, integrals and annulus sums reduce to prefix-sum lookups.
class BallIndex {
 public:
  BallIndex(const DiscreteSpace& space, const DominatingFunction& lambda);

  const DiscreteSpace& space() const { return *space_; }
  const DominatingFunction& lambda() const { return *lambda_; }
  std::size_t point_count() const { return n_; }
  std::size_t ball_count() const { return offsets_.back(); }
  double epsilon_min() const { return eps_min_; }

  BallId id(PointIndex center, std::size_t rank) const { return offsets_[center] + rank; }
  std::size_t rank_count(PointIndex center) const { return offsets_[center + 1] - offsets_[center]; }
  PointIndex center_of(BallId b) const { return ball_center_[b]; }
  std::size_t rank_of(BallId b) const { return b - offsets_[ball_center_[b]]; }
  double radius(BallId b) const { return radii_[b]; }
  std::span<const double> radii(PointIndex center) const {
    return {radii_.data() + offsets_[center], rank_count(center)};
  }

  /// All points sorted by distance from center.
  std::span<const PointIndex> order(PointIndex center) const { return {order_.data() + center * n_, n_}; }
  std::span<const double> sorted_distances(PointIndex center) const {
    return {sorted_.data() + center * n_, n_};
  }
  /// Position of y in order(center).
  std::size_t position(PointIndex center, PointIndex y) const { return position_[center * n_ + y]; }

  std::size_t member_count(BallId b) const { return counts_[b]; }
  std::span<const PointIndex> members(BallId b) const {
    return {order_.data() + ball_center_[b] * n_, counts_[b]};
  }
  double measure(BallId b) const { return prefix_mass_[ball_center_[b] * (n_ + 1) + counts_[b]]; }
  bool contains(BallId b, PointIndex y) const {
    return space_->distance(ball_center_[b], y) <= radii_[b];
  }

  /// Number of points within distance r of center.
  std::size_t count_within(PointIndex center, double r) const;
  double measure_within(PointIndex center, double r) const {
    return prefix_mass_[center * (n_ + 1) + count_within(center, r)];
  }
  /// Candidate ball with the same member set as B(center, r).
  BallId snap(PointIndex center, double r) const;

  /// Sum of mass(y) / lambda(center, d(center, y)) over lo <= d(center, y) <= hi, d > 0.
  double annulus_sum(PointIndex center, double lo, double hi) const;
  /// 1 + annulus_sum(center, r_inner, r_outer).
  double k_coefficient(PointIndex center, double r_inner, double r_outer) const {
    return 1.0 + annulus_sum(center, r_inner, r_outer);
  }

  /// Prefix sums of weights[y] * mass(y) along every center's order; layout n x (n + 1).
  std::vector<double> weighted_prefix(std::span<const double> weights) const;

 private:
  const DiscreteSpace* space_;
  const DominatingFunction* lambda_;
  std::size_t n_;
  double eps_min_;
  std::vector<std::size_t> offsets_;
  std::vector<PointIndex> ball_center_;
  std::vector<double> radii_;
  std::vector<std::size_t> counts_;
  std::vector<PointIndex> order_;
  std::vector<std::size_t> position_;
  std::vector<double> sorted_;
  std::vector<double> prefix_mass_;
  std::vector<double> prefix_annulus_;
};

/// Integrals of a fixed weight function over every candidate ball.
class BallIntegrals {
 public:
  BallIntegrals(const BallIndex& index, std::span<const double> weights)
      : index_(&index), prefix_(index.weighted_prefix(weights)) {}

  /// Sum over members of weights[y] * mass(y).
  double integral(BallId b) const {
    return prefix_[index_->center_of(b) * (index_->point_count() + 1) + index_->member_count(b)];
  }
  double integral_within(PointIndex center, double r) const {
    return prefix_[center * (index_->point_count() + 1) + index_->count_within(center, r)];
  }

 private:
  const BallIndex* index_;
  std::vector<double> prefix_;
};

}  // namespace nhcz
