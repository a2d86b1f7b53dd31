#include "nhcz/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nhcz/covering.hpp"
#include "nhcz/errors.hpp"

namespace nhcz {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> absolute(std::span<const double> f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
  return a;
}

void check_rho(double rho) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw ParameterError("dilation rho must be >= 1");
}

MaximalResult distribute(const BallIndex& index, MaximalKind kind, std::span<const double> ball_value) {
  MaximalResult r;
  r.kind = kind;
  std::vector<BallId> arg;
  r.values = sup_over_containing(index, ball_value, &arg);
  r.witness.resize(r.values.size());
  for (std::size_t x = 0; x < r.values.size(); ++x) {
    if (!std::isfinite(r.values[x])) r.values[x] = 0.0;
    r.witness[x] = to_ball(index, arg[x]);
  }
  return r;
}

}  // namespace

std::string to_string(MaximalKind kind) {
  switch (kind) {
    case MaximalKind::Noncentered: return "m";
    case MaximalKind::Doubling: return "n";
    case MaximalKind::Sharp: return "sharp";
    case MaximalKind::Power: return "mp";
  }
  return "?";
}

MaximalResult maximal_power(const BallIndex& index, std::span<const double> f, double p, double rho) {
  check_function(index.space(), f);
  check_rho(rho);
  if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("exponent p must be positive");
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = p == 1.0 ? std::abs(f[i]) : std::pow(std::abs(f[i]), p);
  const BallIntegrals integ(index, w);
  std::vector<double> value(index.ball_count(), kNegInf);
  for (BallId b = 0; b < index.ball_count(); ++b) {
    const double denom = index.measure_within(index.center_of(b), rho * index.radius(b));
    if (denom <= 0.0) continue;
    const double avg = integ.integral(b) / denom;
    value[b] = p == 1.0 ? avg : std::pow(avg, 1.0 / p);
  }
  auto r = distribute(index, p == 1.0 ? MaximalKind::Noncentered : MaximalKind::Power, value);
  return r;
}

MaximalResult maximal_noncentered(const BallIndex& index, std::span<const double> f, double rho) {
  return maximal_power(index, f, 1.0, rho);
}

MaximalResult maximal_noncentered(const DiscreteSpace& space, const DominatingFunction& lambda,
                                  std::span<const double> f, double rho) {
  const BallIndex index(space, lambda);
  return maximal_noncentered(index, f, rho);
}

MaximalResult maximal_p(const BallIndex& index, std::span<const double> f, double p, double rho) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("maximal_p requires finite p >= 1");
  auto r = maximal_power(index, f, p, rho);
  r.kind = MaximalKind::Power;
  return r;
}

MaximalResult maximal_p(const DiscreteSpace& space, const DominatingFunction& lambda, std::span<const double> f,
                        double p, double rho) {
  const BallIndex index(space, lambda);
  return maximal_p(index, f, p, rho);
}

MaximalResult maximal_doubling(const BallIndex& index, std::span<const double> f, const DoublingParams& params) {
  check_function(index.space(), f);
  params.check(index.lambda());
  const auto flags = doubling_flags(index, 6.0, params.beta0);
  const BallIntegrals integ(index, absolute(f));
  std::vector<double> value(index.ball_count(), kNegInf);
  for (BallId b = 0; b < index.ball_count(); ++b) {
    const double mu = index.measure(b);
    if (flags[b] && mu > 0.0) value[b] = integ.integral(b) / mu;
  }
  return distribute(index, MaximalKind::Doubling, value);
}

MaximalResult maximal_doubling(const DiscreteSpace& space, const DominatingFunction& lambda,
                               std::span<const double> f, const DoublingParams& params) {
  const BallIndex index(space, lambda);
  return maximal_doubling(index, f, params);
}

MaximalResult sharp_maximal(const BallIndex& index, std::span<const double> f, const DoublingParams& params,
                            const PairScanOptions& pairs) {
  check_function(index.space(), f);
  params.check(index.lambda());
  const DiscreteSpace& space = index.space();
  const std::size_t nb = index.ball_count();

  const BallIntegrals integ(index, f);
  std::vector<double> mean(nb, 0.0);
  for (BallId b = 0; b < nb; ++b) {
    const double mu = index.measure(b);
    if (mu > 0.0) mean[b] = integ.integral(b) / mu;
  }

  const auto hulls = doubling_hulls(index, params.beta0);
  std::vector<double> first(nb, kNegInf);
#pragma omp parallel for schedule(dynamic)
  for (BallId b = 0; b < nb; ++b) {
    const PointIndex c = index.center_of(b);
    const double denom = index.measure_within(c, 6.0 * index.radius(b));
    if (denom <= 0.0) continue;
    const double m = mean[hulls[b]];
    double s = 0.0;
    for (const PointIndex y : index.members(b)) s += std::abs(f[y] - m) * space.mass(y);
    first[b] = s / denom;
  }

  const auto flags = doubling_flags(index, 6.0, params.beta0);
  std::vector<char> ok(nb, 0);
  for (BallId b = 0; b < nb; ++b) ok[b] = flags[b] && index.measure(b) > 0.0;
  const auto scan = scan_nested_pairs(
      index, ok, ok,
      [&](BallId q, BallId r) {
        const double k = index.k_coefficient(index.center_of(q), index.radius(q), index.radius(r));
        return std::abs(mean[q] - mean[r]) / k;
      },
      pairs);

  MaximalResult res = distribute(index, MaximalKind::Sharp, first);
  res.first_term = res.values;
  res.second_term = sup_over_containing(index, scan.best);
  for (std::size_t x = 0; x < res.values.size(); ++x) {
    if (!std::isfinite(res.second_term[x])) res.second_term[x] = 0.0;
    res.values[x] = res.first_term[x] + res.second_term[x];
  }
  res.exact = scan.exact;
  res.pair_total = scan.total_pairs;
  res.pair_visited = scan.visited;
  return res;
}

MaximalResult sharp_maximal(const DiscreteSpace& space, const DominatingFunction& lambda,
                            std::span<const double> f, const DoublingParams& params, const PairScanOptions& pairs) {
  const BallIndex index(space, lambda);
  return sharp_maximal(index, f, params, pairs);
}

double lp_norm(const DiscreteSpace& space, std::span<const double> f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x)
      if (space.mass(x) > 0.0) m = std::max(m, std::abs(f[x]));
    return m;
  }
  if (!(p > 0.0)) throw ParameterError("lp_norm requires p > 0");
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s += std::pow(std::abs(f[x]), p) * space.mass(x);
  return std::pow(s, 1.0 / p);
}

double level_set_measure(const DiscreteSpace& space, std::span<const double> values, double level) {
  double mu = 0.0;
  for (std::size_t x = 0; x < values.size(); ++x)
    if (values[x] > level) mu += space.mass(x);
  return mu;
}

std::vector<double> level_grid(std::span<const double> values, std::size_t count) {
  double hi = 0.0;
  for (const double v : values)
    if (std::isfinite(v)) hi = std::max(hi, std::abs(v));
  if (hi <= 0.0 || count == 0) return {};
  double lo = hi;
  for (const double v : values)
    if (std::abs(v) > 0.0) lo = std::min(lo, std::abs(v));
  lo = std::max(lo, hi * 1e-3) * (1.0 - 1e-9);
  const double top = hi * (1.0 - 1e-9);
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = lo * std::pow(top / lo, t);
  }
  return grid;
}

CheckReport good_lambda_check(const BallIndex& index, std::span<const double> f, const GoodLambdaParams& params,
                              const DoublingParams& doubling, const PairScanOptions& pairs) {
  const DiscreteSpace& space = index.space();
  check_function(space, f);
  if (!(params.epsilon > 0.0) || !(params.delta > 0.0) || !(params.nu > 0.0 && params.nu < 1.0))
    throw ParameterError("good-lambda parameters need epsilon, delta > 0 and nu in (0, 1)");
  double integral = 0.0, l1 = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    integral += f[x] * space.mass(x);
    l1 += std::abs(f[x]) * space.mass(x);
  }
  if (std::abs(integral) > 1e-9 * std::max(l1, 1e-300) && l1 > 0.0)
    throw ArgumentError("good-lambda inequality needs a mean-zero function on a finite measure space");

  CheckReport rep;
  rep.check = "good_lambda";
  rep.set("epsilon", params.epsilon);
  rep.set("delta", params.delta);
  rep.set("nu", params.nu);
  const auto nf = maximal_doubling(index, f, doubling);
  const auto ms = sharp_maximal(index, f, doubling, pairs);
  rep.exact = ms.exact;
  double worst = 0.0;
  std::size_t violations = 0;
  auto rows = nlohmann::json::array();
  for (const double t : params.lambdas) {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (nf.values[x] > t) rhs += space.mass(x);
      if (nf.values[x] > (1.0 + params.epsilon) * t && ms.values[x] <= params.delta * t) lhs += space.mass(x);
    }
    const double best_nu = lhs > 0.0 ? lhs / rhs : 0.0;
    worst = std::max(worst, best_nu);
    if (lhs > params.nu * rhs) ++violations;
    rows.push_back({{"lambda", t}, {"lhs", lhs}, {"rhs", rhs}, {"best_nu", best_nu}});
  }
  rep.vacuous = params.lambdas.empty() || l1 == 0.0;
  rep.set("worst_nu", worst);
  rep.set("levels", static_cast<double>(params.lambdas.size()));
  rep.set("levels_above_nu", static_cast<double>(violations));
  rep.witness["table"] = rows;
  return rep;
}

CheckReport maximal_weak11_check(const BallIndex& index, std::span<const double> f,
                                 std::span<const double> levels) {
  const DiscreteSpace& space = index.space();
  CheckReport rep;
  rep.check = "maximal_weak11";
  const double rho = vitali_dilation(space);
  rep.set("rho", rho);
  const double l1 = lp_norm(space, f, 1.0);
  rep.set("l1", l1);
  const auto m = maximal_noncentered(index, f, rho);
  double worst = 0.0;
  for (const double t : levels) {
    const double lhs = t * level_set_measure(space, m.values, t);
    if (l1 > 0.0) worst = std::max(worst, lhs / l1);
    if (!(lhs <= l1 * (1.0 + 1e-9))) {
      rep.witness["level"] = t;
      rep.witness["lhs"] = lhs;
    }
    rep.assert_that("weak11_constant_one", lhs <= l1 * (1.0 + 1e-9),
                    "level " + std::to_string(t) + " gives " + std::to_string(lhs));
  }
  rep.vacuous = l1 == 0.0 || levels.empty();
  rep.set("constant", worst);
  return rep;
}

}  // namespace nhcz
