#include "nhcz/ball_index.hpp"

#include <algorithm>
#include <numeric>

namespace nhcz {

BallIndex::BallIndex(const DiscreteSpace& space, const DominatingFunction& lambda)
    : space_(&space), lambda_(&lambda), n_(space.size()), eps_min_(nhcz::epsilon_min(space)) {
  order_.resize(n_ * n_);
  position_.resize(n_ * n_);
  sorted_.resize(n_ * n_);
  prefix_mass_.assign(n_ * (n_ + 1), 0.0);
  prefix_annulus_.assign(n_ * (n_ + 1), 0.0);
  offsets_.assign(n_ + 1, 0);

  const bool degenerate = !space.min_positive_distance().has_value();
  for (PointIndex c = 0; c < n_; ++c) {
    const auto row = space.distance_row(c);
    PointIndex* ord = order_.data() + c * n_;
    std::iota(ord, ord + n_, PointIndex{0});
    std::sort(ord, ord + n_,
              [&](PointIndex a, PointIndex b) { return row[a] < row[b] || (row[a] == row[b] && a < b); });
    double* pm = prefix_mass_.data() + c * (n_ + 1);
    double* pa = prefix_annulus_.data() + c * (n_ + 1);
    for (std::size_t j = 0; j < n_; ++j) {
      const PointIndex y = ord[j];
      const double d = row[y];
      sorted_[c * n_ + j] = d;
      position_[c * n_ + y] = j;
      pm[j + 1] = pm[j] + space.mass(y);
      pa[j + 1] = pa[j] + (d > 0.0 ? space.mass(y) / lambda(c, d) : 0.0);
    }

    const double* sd = sorted_.data() + c * n_;
    const std::size_t first = offsets_[c];
    if (degenerate) {
      radii_.push_back(1.0);
      counts_.push_back(n_);
    } else {
      radii_.push_back(eps_min_);
      counts_.push_back(static_cast<std::size_t>(std::upper_bound(sd, sd + n_, eps_min_) - sd));
      for (std::size_t j = 0; j < n_; ++j) {
        if (sd[j] <= 0.0) continue;
        if (j + 1 < n_ && sd[j + 1] == sd[j]) continue;
        radii_.push_back(sd[j]);
        counts_.push_back(j + 1);
      }
    }
    offsets_[c + 1] = radii_.size();
    ball_center_.resize(radii_.size(), c);
    (void)first;
  }
}

std::size_t BallIndex::count_within(PointIndex center, double r) const {
  const double* sd = sorted_.data() + center * n_;
  return static_cast<std::size_t>(std::upper_bound(sd, sd + n_, r) - sd);
}

BallId BallIndex::snap(PointIndex center, double r) const {
  const auto rs = radii(center);
  const auto it = std::upper_bound(rs.begin(), rs.end(), r);
  const std::size_t rank = it == rs.begin() ? 0 : static_cast<std::size_t>(it - rs.begin()) - 1;
  return id(center, rank);
}

double BallIndex::annulus_sum(PointIndex center, double lo, double hi) const {
  if (hi < lo) return 0.0;
  const double* sd = sorted_.data() + center * n_;
  const std::size_t a = static_cast<std::size_t>(std::lower_bound(sd, sd + n_, lo) - sd);
  const std::size_t b = static_cast<std::size_t>(std::upper_bound(sd, sd + n_, hi) - sd);
  if (b <= a) return 0.0;
  const double* pa = prefix_annulus_.data() + center * (n_ + 1);
  return pa[b] - pa[a];
}

std::vector<double> BallIndex::weighted_prefix(std::span<const double> weights) const {
  std::vector<double> out(n_ * (n_ + 1), 0.0);
  for (PointIndex c = 0; c < n_; ++c) {
    const PointIndex* ord = order_.data() + c * n_;
    double* p = out.data() + c * (n_ + 1);
    for (std::size_t j = 0; j < n_; ++j) p[j + 1] = p[j] + weights[ord[j]] * space_->mass(ord[j]);
  }
  return out;
}

}  // namespace nhcz
