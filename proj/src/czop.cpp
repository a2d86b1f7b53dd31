#include "nhcz/czop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "nhcz/errors.hpp"
#include "nhcz/maximal.hpp"

namespace nhcz {

Kernel::Kernel(std::string name, Rule rule, bool complex_valued, double claimed_delta,
               std::optional<double> claimed_size)
    : name_(std::move(name)),
      rule_(std::move(rule)),
      complex_(complex_valued),
      delta_(claimed_delta),
      size_(claimed_size) {
  if (!rule_) throw ArgumentError("kernel '" + name_ + "' has no evaluation rule");
  if (!(delta_ > 0.0 && delta_ <= 1.0)) throw ParameterError("claimed Holder exponent must lie in (0, 1]");
}

Complex bergman_kernel_value(std::span<const double> x, std::span<const double> y, double m) {
  // conj(x).y summed over complex coordinates
  Complex dot = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); j += 2) dot += Complex(x[j], -x[j + 1]) * Complex(y[j], y[j + 1]);
  return std::pow(Complex(1.0, 0.0) - dot, -m);
}

std::vector<std::string> kernel_names() {
  return {"bergman", "inverse-lambda", "antisymmetric-lambda", "zero", "constant"};
}

Kernel make_kernel(const std::string& name, const DiscreteSpace& space, const DominatingFunction& lambda,
                   const nlohmann::json& params) {
  const DiscreteSpace* sp = &space;
  const DominatingFunction* lam = &lambda;
  if (name == "bergman") {
    if (space.distance_kind() != DistanceKind::Bergman || !space.has_coordinates())
      throw ArgumentError("the bergman kernel needs a space with Bergman coordinates");
    const double m = params.value("m", 1.0);
    if (!(m > 0.0)) throw ParameterError("bergman exponent m must be positive");
    return Kernel(
        "bergman",
        [sp, m](PointIndex x, PointIndex y) {
          return bergman_kernel_value(sp->coordinates()[x], sp->coordinates()[y], m);
        },
        true);
  }
  if (name == "inverse-lambda") {
    return Kernel("inverse-lambda",
                  [sp, lam](PointIndex x, PointIndex y) { return Complex(1.0 / (*lam)(x, sp->distance(x, y))); });
  }
  if (name == "antisymmetric-lambda") {
    return Kernel("antisymmetric-lambda", [sp, lam](PointIndex x, PointIndex y) {
      if (x == y) return Complex(0.0);
      const double d = sp->distance(x, y);
      const double v = 2.0 / ((*lam)(x, d) + (*lam)(y, d));
      return Complex(x < y ? v : -v);
    });
  }
  if (name == "zero") return Kernel("zero", [](PointIndex, PointIndex) { return Complex(0.0); });
  if (name == "constant") {
    const double c = params.value("value", 1.0);
    return Kernel("constant", [c](PointIndex, PointIndex) { return Complex(c); });
  }
  throw ArgumentError("unknown kernel '" + name + "'");
}

FunctionOnSpace real_part(std::span<const Complex> g) {
  FunctionOnSpace out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].real();
  return out;
}

FunctionOnSpace imag_part(std::span<const Complex> g) {
  FunctionOnSpace out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].imag();
  return out;
}

FunctionOnSpace modulus(std::span<const Complex> g) {
  FunctionOnSpace out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::abs(g[i]);
  return out;
}

ComplexFunction apply_truncated(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f,
                                double epsilon) {
  check_function(space, f);
  if (!(epsilon > 0.0)) throw ParameterError("truncation epsilon must be positive");
  const std::size_t n = space.size();
  ComplexFunction out(n);
#pragma omp parallel for schedule(static)
  for (PointIndex x = 0; x < n; ++x) {
    const auto row = space.distance_row(x);
    Complex s = 0.0;
    for (PointIndex y = 0; y < n; ++y)
      if (row[y] >= epsilon && f[y] != 0.0) s += kernel(x, y) * (f[y] * space.mass(y));
    out[x] = s;
  }
  return out;
}

ComplexFunction apply_operator(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f) {
  return apply_truncated(space, kernel, f, epsilon_min(space));
}

FunctionOnSpace maximal_truncated(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f) {
  check_function(space, f);
  const std::size_t n = space.size();
  FunctionOnSpace out(n, 0.0);
#pragma omp parallel for schedule(static)
  for (PointIndex x = 0; x < n; ++x) {
    const auto row = space.distance_row(x);
    std::vector<PointIndex> ord(n);
    for (PointIndex y = 0; y < n; ++y) ord[y] = y;
    std::sort(ord.begin(), ord.end(), [&](PointIndex a, PointIndex b) {
      return row[a] != row[b] ? row[a] > row[b] : a < b;
    });
    // Descending distance; the partial sum after a full tie group is T_eps at eps = that distance.
    Complex s = 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const PointIndex y = ord[i];
      if (row[y] <= 0.0) break;
      if (f[y] != 0.0) s += kernel(x, y) * (f[y] * space.mass(y));
      if (i + 1 == n || row[ord[i + 1]] != row[y]) best = std::max(best, std::abs(s));
    }
    out[x] = best;
  }
  return out;
}

ComplexFunction commutator_apply(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> b,
                                 std::span<const double> f, double epsilon) {
  check_function(space, b);
  check_function(space, f);
  FunctionOnSpace bf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) bf[i] = b[i] * f[i];
  const auto tf = apply_truncated(space, kernel, f, epsilon);
  const auto tbf = apply_truncated(space, kernel, bf, epsilon);
  ComplexFunction out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = b[i] * tf[i] - tbf[i];
  return out;
}

KernelSizeFit validate_kernel_size(const DiscreteSpace& space, const Kernel& kernel,
                                   const DominatingFunction& lambda) {
  KernelSizeFit fit;
  const std::size_t n = space.size();
  for (PointIndex x = 0; x < n; ++x)
    for (PointIndex y = 0; y < n; ++y) {
      const double d = space.distance(x, y);
      if (x == y || d <= 0.0) continue;
      ++fit.pairs;
      const double c = std::abs(kernel(x, y)) * std::max(lambda(x, d), lambda(y, d));
      if (c > fit.c_fit) {
        fit.c_fit = c;
        fit.worst_x = x;
        fit.worst_y = y;
      }
    }
  return fit;
}

double KernelHolderFit::constant_for(double d) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [u, v] : frontier) best = std::max(best, v + d * u);
  return frontier.empty() ? 0.0 : std::exp(best);
}

KernelHolderFit validate_kernel_holder(const DiscreteSpace& space, const Kernel& kernel,
                                       const DominatingFunction& lambda, double shrink,
                                       std::optional<double> delta, double ceiling) {
  if (!(shrink > 0.0 && shrink <= 1.0)) throw ParameterError("shrink must lie in (0, 1]");
  KernelHolderFit fit;
  fit.delta = delta.value_or(kernel.claimed_delta());
  if (!(fit.delta > 0.0 && fit.delta <= 1.0)) throw ParameterError("Holder exponent must lie in (0, 1]");
  const std::size_t n = space.size();
  std::vector<Complex> k(n * n, 0.0);
  for (PointIndex x = 0; x < n; ++x)
    for (PointIndex y = 0; y < n; ++y)
      if (space.distance(x, y) > 0.0) k[x * n + y] = kernel(x, y);

  // Pareto frontier keyed by u = -log ratio; kept with v strictly decreasing in u.
  std::map<double, double> front;
  auto insert = [&](double u, double v) {
    auto it = front.lower_bound(u);
    if (it != front.end() && it->second >= v) return;
    it = front.insert_or_assign(u, v).first;
    while (it != front.begin()) {
      auto prev = std::prev(it);
      if (prev->second > v) break;
      front.erase(prev);
    }
  };

  double c_best = 0.0;
  for (PointIndex x = 0; x < n; ++x)
    for (PointIndex y = 0; y < n; ++y) {
      const double dxy = space.distance(x, y);
      if (dxy <= 0.0) continue;
      const double lam = lambda(x, dxy);
      for (PointIndex xp = 0; xp < n; ++xp) {
        const double dxx = space.distance(x, xp);
        if (dxx <= 0.0 || dxx > shrink * dxy || space.distance(xp, y) <= 0.0) continue;
        ++fit.triples;
        const double amp =
            (std::abs(k[x * n + y] - k[xp * n + y]) + std::abs(k[y * n + x] - k[y * n + xp])) * lam;
        if (amp <= 0.0) continue;
        const double ratio = dxx / dxy;
        const double c = amp / std::pow(ratio, fit.delta);
        if (c > c_best) {
          c_best = c;
          fit.worst_x = x;
          fit.worst_xp = xp;
          fit.worst_y = y;
        }
        insert(-std::log(ratio), std::log(amp));
      }
    }
  fit.empty = fit.triples == 0;
  fit.c_fit = c_best;
  fit.frontier.assign(front.begin(), front.end());
  const double c0 = fit.constant_for(0.0);
  fit.ceiling = ceiling > 0.0 ? ceiling : 2.0 * c0;
  if (fit.empty) return fit;
  if (fit.frontier.empty()) {
    fit.delta_fit = 1.0;
    return fit;
  }
  if (c0 > fit.ceiling) return fit;
  double dmax = 1.0;
  const double lc = std::log(fit.ceiling);
  for (const auto& [u, v] : fit.frontier)
    if (u > 0.0) dmax = std::min(dmax, (lc - v) / u);
  fit.delta_fit = std::max(0.0, dmax);
  return fit;
}

namespace {

std::vector<std::vector<double>> boundary_sample(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  if (n == 1) {
    for (std::size_t k = 0; k < count; ++k) {
      const double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(count);
      pts.push_back({std::cos(t), std::sin(t)});
    }
    return pts;
  }
  std::mt19937_64 rng(seed ^ 0xb0b0b0b0ULL);
  std::normal_distribution<double> g;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> z(2 * n);
    double s = 0.0;
    for (auto& v : z) {
      v = g(rng);
      s += v * v;
    }
    s = std::sqrt(s);
    for (auto& v : z) v /= s;
    pts.push_back(std::move(z));
  }
  return pts;
}

}  // namespace

BergmanInstance bergman_kernel(const BergmanConfig& config) {
  if (config.n == 0) throw ParameterError("complex dimension must be positive");
  if (!(config.m > 0.0)) throw ParameterError("bergman exponent m must be positive");
  if (config.points.empty()) throw ParameterError("bergman sample needs at least one point");
  const std::size_t np = config.points.size();
  for (const auto& p : config.points) {
    if (p.size() != 2 * config.n) throw ParameterError("point dimension must be 2n (interleaved re, im)");
    double s = 0.0;
    for (const double v : p) s += v * v;
    if (!(s > 0.0) || s > 1.0 + 1e-12) throw ParameterError("bergman points need 0 < |x| <= 1");
  }

  std::vector<double> dist(np * np, 0.0);
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = i + 1; j < np; ++j)
      dist[i * np + j] = dist[j * np + i] = bergman_quasi_distance(config.points[i], config.points[j]);
  double a = np <= kExhaustiveTriangleLimit ? DiscreteSpace::fit_quasi_constant(np, dist) : 2.0;
  if (a <= 1.0 + 1e-12) a = 1.0;

  const std::size_t nb = config.boundary_samples ? config.boundary_samples : 256 * config.n;
  const auto boundary = boundary_sample(config.n, nb, config.seed);
  std::vector<double> delta(np, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < np; ++i)
    for (const auto& z : boundary) delta[i] = std::min(delta[i], bergman_quasi_distance(config.points[i], z));

  auto probe = DiscreteSpace::from_coordinates(config.points, std::vector<double>(np, 1.0), DistanceKind::Bergman, a);
  auto lambda = DominatingFunction::floored_power(1.0, config.m, delta);
  double w = std::numeric_limits<double>::infinity();
  PointIndex wx = 0;
  for (PointIndex x = 0; x < np; ++x) {
    const auto row = probe.distance_row(x);
    for (const double r : candidate_radii(probe, x)) {
      std::size_t count = 0;
      for (const double d : row) count += d <= r;
      const double cap = lambda(x, r) / static_cast<double>(count);
      if (cap < w) {
        w = cap;
        wx = x;
      }
    }
  }
  if (!(w > 0.0) || !std::isfinite(w))
    throw ConstructionError("no positive mass keeps the sample upper doubling (witness point " +
                            std::to_string(wx) + ")");
  w *= 1.0 - 1e-12;
  auto space = DiscreteSpace::from_coordinates(config.points, std::vector<double>(np, w), DistanceKind::Bergman, a);
  const double m = config.m;
  auto coords = config.points;
  Kernel kernel(
      "bergman",
      [coords = std::move(coords), m](PointIndex x, PointIndex y) {
        return bergman_kernel_value(coords[x], coords[y], m);
      },
      true);
  return BergmanInstance{std::move(space), std::move(lambda), std::move(kernel), std::move(delta), w};
}

CheckReport cotlar_check(const BallIndex& index, const Kernel& kernel, std::span<const double> f, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("Cotlar exponent eta must lie in (0, 1)");
  const DiscreteSpace& space = index.space();
  CheckReport rep;
  rep.check = "cotlar";
  rep.set("eta", eta);
  const auto tstar = maximal_truncated(space, kernel, f);
  const auto tf = modulus(apply_operator(space, kernel, f));
  const auto meta = maximal_power(index, tf, eta, 6.0);
  const auto m5 = maximal_noncentered(index, f, 5.0);
  double worst = 0.0;
  std::size_t skipped = 0, used = 0;
  PointIndex arg = 0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    const double denom = meta.values[x] + m5.values[x];
    if (!(denom > 0.0)) {
      ++skipped;
      continue;
    }
    ++used;
    const double r = tstar[x] / denom;
    if (r > worst) {
      worst = r;
      arg = x;
    }
  }
  rep.vacuous = used == 0 || lp_norm(space, f, 1.0) == 0.0;
  rep.set("constant", worst);
  rep.set("skipped_points", static_cast<double>(skipped));
  rep.witness["point"] = arg;
  return rep;
}

CheckReport weak11_check(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f,
                         std::span<const double> levels) {
  CheckReport rep;
  rep.check = "operator_weak11";
  const double l1 = lp_norm(space, f, 1.0);
  rep.set("l1", l1);
  if (l1 == 0.0) {
    rep.vacuous = true;
    rep.set("constant", 0.0);
    return rep;
  }
  const auto tf = modulus(apply_operator(space, kernel, f));
  std::vector<double> grid(levels.begin(), levels.end());
  if (grid.empty()) grid = level_grid(tf);
  double worst = 0.0;
  double arg = 0.0;
  for (const double t : grid) {
    const double r = t * level_set_measure(space, tf, t) / l1;
    if (r > worst) {
      worst = r;
      arg = t;
    }
  }
  rep.set("constant", worst);
  rep.witness["level"] = arg;
  return rep;
}

}  // namespace nhcz
