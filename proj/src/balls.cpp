#include "nhcz/balls.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhcz/errors.hpp"

namespace nhcz {

namespace {

void check_ball(const DiscreteSpace& space, const Ball& b) {
  if (b.center >= space.size()) throw ArgumentError("ball center out of range");
  if (!(b.radius > 0.0) || !std::isfinite(b.radius)) throw ArgumentError("ball radius must be positive");
}

std::string describe(const Ball& b) {
  std::ostringstream os;
  os << "B(" << b.center << ", " << b.radius << ")";
  return os.str();
}

}  // namespace

std::vector<PointIndex> ball_members(const DiscreteSpace& space, const Ball& b) {
  return ball_members(space, b.center, b.radius);
}

double ball_measure(const DiscreteSpace& space, const Ball& b) {
  const auto row = space.distance_row(b.center);
  double mu = 0.0;
  for (PointIndex y = 0; y < space.size(); ++y)
    if (row[y] <= b.radius) mu += space.mass(y);
  return mu;
}

bool ball_subset(const DiscreteSpace& space, const Ball& inner, const Ball& outer) {
  const auto ri = space.distance_row(inner.center);
  const auto ro = space.distance_row(outer.center);
  for (PointIndex y = 0; y < space.size(); ++y)
    if (ri[y] <= inner.radius && ro[y] > outer.radius) return false;
  return true;
}

bool balls_intersect(const DiscreteSpace& space, const Ball& a, const Ball& b) {
  const auto ra = space.distance_row(a.center);
  const auto rb = space.distance_row(b.center);
  for (PointIndex y = 0; y < space.size(); ++y)
    if (ra[y] <= a.radius && rb[y] <= b.radius) return true;
  return false;
}

double default_beta0(const DominatingFunction& lambda) {
  const double a = std::pow(lambda.doubling_constant(), 3.0 * std::log2(6.0));
  const double b = std::pow(6.0, 3.0 * lambda.degree());
  return 1.0 + std::max(a, b);
}

DoublingParams DoublingParams::standard(const DominatingFunction& lambda) {
  const double b0 = default_beta0(lambda);
  return {6.0, b0, b0};
}

void DoublingParams::check(const DominatingFunction& lambda) const {
  if (!(alpha > 1.0) || !(beta > 1.0)) throw ParameterError("doubling parameters need alpha > 1 and beta > 1");
  const double floor = default_beta0(lambda) - 1.0;
  if (!(beta0 > floor))
    throw ParameterError("beta0 must exceed max{C_lambda^(3 log2 6), 6^(3n)} = " + std::to_string(floor));
}

bool is_doubling(const DiscreteSpace& space, const DominatingFunction&, const Ball& b,
                 const DoublingParams& params) {
  check_ball(space, b);
  const double mu = ball_measure(space, b);
  if (mu == 0.0) return true;
  return ball_measure(space, b.dilate(params.alpha)) <= params.beta * mu;
}

Ball smallest_doubling_up(const DiscreteSpace& space, const DominatingFunction& lambda, const Ball& b,
                          const DoublingParams& params) {
  check_ball(space, b);
  const double need = std::pow(lambda.doubling_constant(), std::log2(params.alpha));
  if (!(params.alpha > 1.0) || !(params.beta > need))
    throw ParameterError("smallest_doubling_up requires beta > C_lambda^(log2 alpha) = " + std::to_string(need));
  Ball cur = b;
  while (true) {
    const double mu = ball_measure(space, cur);
    if (mu == 0.0 || mu >= space.total_mass()) return cur;
    if (ball_measure(space, cur.dilate(params.alpha)) <= params.beta * mu) return cur;
    cur = cur.dilate(params.alpha);
  }
}

std::optional<Ball> largest_doubling_down(const DiscreteSpace& space, const DominatingFunction& lambda,
                                          const Ball& b, const DoublingParams& params) {
  check_ball(space, b);
  const double need = std::pow(params.alpha, lambda.degree());
  if (!(params.alpha > 1.0) || !(params.beta > need))
    throw ParameterError("largest_doubling_down requires beta > alpha^n = " + std::to_string(need));
  const double floor = epsilon_min(space);
  Ball cur = b;
  while (cur.radius >= floor) {
    if (is_doubling(space, lambda, cur, params)) return cur;
    cur = cur.dilate(1.0 / params.alpha);
  }
  return std::nullopt;
}

Ball doubling_hull(const DiscreteSpace& space, const DominatingFunction& lambda, const Ball& b, double beta0) {
  return smallest_doubling_up(space, lambda, b, {6.0, beta0, beta0});
}

CoefficientReport coefficient_K(const DiscreteSpace& space, const DominatingFunction& lambda, const Ball& b,
                                const Ball& q) {
  check_ball(space, b);
  check_ball(space, q);
  if (!ball_subset(space, b, q))
    throw ArgumentError("coefficient K needs " + describe(b) + " contained in " + describe(q));
  CoefficientReport rep;
  const auto row = space.distance_row(b.center);
  std::vector<PointIndex> pts;
  for (PointIndex x = 0; x < space.size(); ++x)
    if (row[x] >= b.radius && row[x] <= q.radius && row[x] > 0.0) pts.push_back(x);
  std::sort(pts.begin(), pts.end(),
            [&](PointIndex a, PointIndex c) { return row[a] < row[c] || (row[a] == row[c] && a < c); });
  for (PointIndex x : pts) {
    const double t = space.mass(x) / lambda(b.center, row[x]);
    rep.value += t;
    rep.terms.emplace_back(x, t);
  }
  std::size_t n = 0;
  for (double r = b.radius; r < q.radius; r *= 6.0) ++n;
  rep.n_bq = n;
  return rep;
}

CoefficientReport coefficient_Kprime(const DiscreteSpace& space, const DominatingFunction& lambda,
                                     const Ball& b, const Ball& q) {
  const CoefficientReport k = coefficient_K(space, lambda, b, q);
  CoefficientReport rep;
  rep.n_bq = k.n_bq;
  double r = b.radius;
  for (std::size_t j = 1; j <= k.n_bq; ++j) {
    r *= 6.0;
    const double t = ball_measure(space, {b.center, r}) / lambda(b.center, r);
    rep.value += t;
    rep.terms.emplace_back(j, t);
  }
  if (lambda.is_homogeneous()) rep.k_over_kprime = k.value / rep.value;
  return rep;
}

std::vector<char> doubling_flags(const BallIndex& index, double alpha, double beta) {
  std::vector<char> flags(index.ball_count(), 0);
  for (BallId b = 0; b < index.ball_count(); ++b) {
    const double mu = index.measure(b);
    flags[b] = mu == 0.0 || index.measure_within(index.center_of(b), index.radius(b) * alpha) <= beta * mu;
  }
  return flags;
}

std::vector<BallId> doubling_hulls(const BallIndex& index, double beta0) {
  std::vector<BallId> hull(index.ball_count());
  const double total = index.space().total_mass();
  for (BallId b = 0; b < index.ball_count(); ++b) {
    const PointIndex c = index.center_of(b);
    double r = index.radius(b);
    while (true) {
      const double mu = index.measure_within(c, r);
      if (mu == 0.0 || mu >= total || index.measure_within(c, r * 6.0) <= beta0 * mu) break;
      r *= 6.0;
    }
    hull[b] = index.snap(c, r);
  }
  return hull;
}

NonDoublingRunReport non_doubling_run_constant(const BallIndex& index, double alpha, double beta) {
  NonDoublingRunReport rep;
  rep.witness = to_ball(index, 0);
  const double total = index.space().total_mass();
  for (BallId q = 0; q < index.ball_count(); ++q) {
    const PointIndex c = index.center_of(q);
    const double r0 = index.radius(q);
    double r = r0 * alpha;
    std::size_t run = 1;
    while (true) {
      const double mu = index.measure_within(c, r);
      if (mu == 0.0 || mu >= total || index.measure_within(c, r * alpha) <= beta * mu) break;
      r *= alpha;
      ++run;
    }
    const double k = index.k_coefficient(c, r0, r);
    if (k > rep.max_k) {
      rep.max_k = k;
      rep.witness = {c, r0};
      rep.witness_run = run;
    }
  }
  return rep;
}

double compatible_size_constant(const BallIndex& index, double ratio_bound) {
  double best = 1.0;
  for (PointIndex c = 0; c < index.point_count(); ++c) {
    const auto rs = index.radii(c);
    for (double rq : rs) {
      const auto it = std::upper_bound(rs.begin(), rs.end(), ratio_bound * rq);
      const double rr = *(it - 1);
      best = std::max(best, index.k_coefficient(c, rq, rr));
    }
  }
  return best;
}

}  // namespace nhcz
