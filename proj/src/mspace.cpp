#include "nhcz/mspace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>

#include "nhcz/errors.hpp"

namespace nhcz {

namespace {

constexpr double kTriangleSlack = 1e-12;
constexpr std::size_t kSampledTriples = 2'000'000;
constexpr std::uint64_t kTriangleSeed = 0x6e68637a5f747269ULL;

std::string describe_triple(std::size_t x, std::size_t y, std::size_t z) {
  std::ostringstream os;
  os << "(" << x << ", " << y << ", " << z << ")";
  return os.str();
}

}  // namespace

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Euclidean: return "euclidean";
    case DistanceKind::Bergman: return "bergman";
  }
  return "euclidean";
}

DistanceKind distance_kind_from_string(const std::string& name) {
  if (name == "euclidean") return DistanceKind::Euclidean;
  if (name == "bergman") return DistanceKind::Bergman;
  throw ArgumentError("unknown distance kind '" + name + "'");
}

double bergman_quasi_distance(std::span<const double> x, std::span<const double> y) {
  double nx = 0.0, ny = 0.0;
  std::complex<double> dot{0.0, 0.0};
  for (std::size_t k = 0; k + 1 < x.size(); k += 2) {
    const std::complex<double> xk{x[k], x[k + 1]};
    const std::complex<double> yk{y[k], y[k + 1]};
    nx += std::norm(xk);
    ny += std::norm(yk);
    dot += std::conj(xk) * yk;
  }
  nx = std::sqrt(nx);
  ny = std::sqrt(ny);
  if (nx == 0.0 || ny == 0.0) throw ArgumentError("bergman quasi-distance is undefined at the origin");
  return std::abs(nx - ny) + std::abs(1.0 - dot / (nx * ny));
}

DiscreteSpace DiscreteSpace::from_coordinates(std::vector<std::vector<double>> points,
                                              std::vector<double> masses, DistanceKind kind,
                                              double quasi_constant) {
  if (points.empty()) throw ArgumentError("a space needs at least one point");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ArgumentError("all points must share one dimension");
    for (double v : p)
      if (!std::isfinite(v)) throw ArgumentError("non-finite coordinate");
  }
  if (kind == DistanceKind::Bergman && (dim == 0 || dim % 2 != 0))
    throw ArgumentError("bergman coordinates are (re, im) pairs");

  DiscreteSpace s;
  s.n_ = points.size();
  s.dim_ = dim;
  s.kind_ = kind;
  s.coords_ = std::move(points);
  s.masses_ = std::move(masses);
  s.dist_.assign(s.n_ * s.n_, 0.0);
  for (std::size_t i = 0; i < s.n_; ++i) {
    for (std::size_t j = i + 1; j < s.n_; ++j) {
      double d = 0.0;
      if (kind == DistanceKind::Euclidean) {
        for (std::size_t k = 0; k < dim; ++k) {
          const double t = s.coords_[i][k] - s.coords_[j][k];
          d += t * t;
        }
        d = std::sqrt(d);
      } else {
        d = bergman_quasi_distance(s.coords_[i], s.coords_[j]);
      }
      s.dist_[i * s.n_ + j] = d;
      s.dist_[j * s.n_ + i] = d;
    }
  }
  s.finalize(quasi_constant);
  return s;
}

DiscreteSpace DiscreteSpace::from_matrix(std::size_t point_count, std::vector<double> distances,
                                         std::vector<double> masses, double quasi_constant) {
  if (point_count == 0) throw ArgumentError("a space needs at least one point");
  if (distances.size() != point_count * point_count)
    throw ArgumentError("distance matrix must have point_count^2 entries");
  for (std::size_t i = 0; i < point_count; ++i) {
    if (distances[i * point_count + i] != 0.0) throw ArgumentError("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < point_count; ++j) {
      const double d = distances[i * point_count + j];
      if (!std::isfinite(d) || d < 0.0) throw ArgumentError("distances must be finite and nonnegative");
      if (d != distances[j * point_count + i]) throw ArgumentError("distance matrix must be symmetric");
    }
  }
  DiscreteSpace s;
  s.n_ = point_count;
  s.dist_ = std::move(distances);
  s.masses_ = std::move(masses);
  s.finalize(quasi_constant);
  return s;
}

void DiscreteSpace::finalize(double quasi_constant) {
  if (masses_.size() != n_) throw ArgumentError("one mass per point is required");
  total_mass_ = 0.0;
  for (double m : masses_) {
    if (!std::isfinite(m) || m < 0.0) throw ArgumentError("masses must be finite and nonnegative");
    total_mass_ += m;
  }
  if (!(total_mass_ > 0.0)) throw ArgumentError("total mass must be positive");
  if (!(quasi_constant >= 1.0) || !std::isfinite(quasi_constant))
    throw ArgumentError("quasi_constant must be a finite number >= 1");
  quasi_constant_ = quasi_constant;

  diameter_ = 0.0;
  min_positive_.reset();
  for (double d : dist_) {
    diameter_ = std::max(diameter_, d);
    if (d > 0.0 && (!min_positive_ || d < *min_positive_)) min_positive_ = d;
  }

  const double a = quasi_constant_ * (1.0 + kTriangleSlack);
  auto check = [&](std::size_t x, std::size_t y, std::size_t z) {
    if (dist_[x * n_ + z] > a * (dist_[x * n_ + y] + dist_[y * n_ + z]))
      throw ArgumentError("quasi-triangle inequality fails for triple " + describe_triple(x, y, z) +
                          " with A = " + std::to_string(quasi_constant_));
  };
  if (n_ <= kExhaustiveTriangleLimit) {
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        for (std::size_t z = x + 1; z < n_; ++z) check(x, y, z);
  } else {
    std::mt19937_64 rng(kTriangleSeed);
    std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
    for (std::size_t t = 0; t < kSampledTriples; ++t) check(pick(rng), pick(rng), pick(rng));
  }
}

double DiscreteSpace::fit_quasi_constant(std::size_t n, std::span<const double> dist) {
  double a = 1.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = x + 1; z < n; ++z) {
      const double dxz = dist[x * n + z];
      if (dxz == 0.0) continue;
      for (std::size_t y = 0; y < n; ++y) {
        const double s = dist[x * n + y] + dist[y * n + z];
        if (s > 0.0) a = std::max(a, dxz / s);
      }
    }
  return a;
}

DominatingFunction DominatingFunction::power_law(double c, double degree) {
  if (!(c > 0.0) || !(degree > 0.0)) throw ParameterError("power law needs c > 0 and n > 0");
  DominatingFunction f;
  f.family_ = Family::PowerLaw;
  f.c_ = c;
  f.degree_ = degree;
  f.doubling_constant_ = std::pow(2.0, degree);
  f.name_ = "power";
  return f;
}

DominatingFunction DominatingFunction::floored_power(double c, double degree, std::vector<double> floors) {
  if (!(c > 0.0) || !(degree > 0.0)) throw ParameterError("floored power needs c > 0 and n > 0");
  for (double v : floors)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("floors must be finite and nonnegative");
  DominatingFunction f;
  f.family_ = Family::FlooredPower;
  f.c_ = c;
  f.degree_ = degree;
  f.doubling_constant_ = std::pow(2.0, degree);
  f.floors_ = std::move(floors);
  f.name_ = "floored";
  return f;
}

DominatingFunction DominatingFunction::floored_power(double c, double degree, double floor,
                                                     std::size_t point_count) {
  return floored_power(c, degree, std::vector<double>(point_count, floor));
}

DominatingFunction DominatingFunction::custom(std::string name, Rule rule, double doubling_constant,
                                              double degree) {
  if (!rule) throw ParameterError("custom dominating function needs a rule");
  if (!(doubling_constant > 1.0)) throw ParameterError("C_lambda must exceed 1");
  DominatingFunction f;
  f.family_ = Family::Custom;
  f.rule_ = std::move(rule);
  f.doubling_constant_ = doubling_constant;
  f.degree_ = degree;
  f.name_ = std::move(name);
  return f;
}

double DominatingFunction::operator()(PointIndex x, double r) const {
  switch (family_) {
    case Family::PowerLaw: return c_ * std::pow(r, degree_);
    case Family::FlooredPower: return c_ * std::pow(std::max(floors_[x], r), degree_);
    case Family::Custom: return rule_(x, r);
  }
  return 0.0;
}

std::string DominatingFunction::family_name() const {
  switch (family_) {
    case Family::PowerLaw: return "power";
    case Family::FlooredPower: return "floored";
    case Family::Custom: return "custom";
  }
  return "custom";
}

void check_function(const DiscreteSpace& space, std::span<const double> f) {
  if (f.size() != space.size())
    throw ArgumentError("function has " + std::to_string(f.size()) + " values for " +
                        std::to_string(space.size()) + " points");
  for (double v : f)
    if (!std::isfinite(v)) throw ArgumentError("function values must be finite");
}

std::vector<PointIndex> ball_members(const DiscreteSpace& space, PointIndex center, double radius) {
  if (center >= space.size()) throw ArgumentError("center index out of range");
  if (!(radius >= 0.0)) throw ArgumentError("radius must be nonnegative");
  std::vector<PointIndex> out;
  const auto row = space.distance_row(center);
  for (PointIndex y = 0; y < space.size(); ++y)
    if (row[y] <= radius) out.push_back(y);
  return out;
}

double measure(const DiscreteSpace& space, std::span<const PointIndex> members) {
  double total = 0.0;
  for (PointIndex y : members) {
    if (y >= space.size()) throw ArgumentError("point index out of range");
    total += space.mass(y);
  }
  return total;
}

double epsilon_min(const DiscreteSpace& space) {
  const auto dmin = space.min_positive_distance();
  return dmin ? *dmin / (2.0 * kMaxDilation) : 1.0;
}

std::vector<double> candidate_radii(const DiscreteSpace& space, PointIndex center) {
  if (center >= space.size()) throw ArgumentError("center index out of range");
  if (!space.min_positive_distance()) return {1.0};
  std::vector<double> d;
  for (double v : space.distance_row(center))
    if (v > 0.0) d.push_back(v);
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  std::vector<double> out;
  out.reserve(d.size() + 1);
  out.push_back(epsilon_min(space));
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

UpperDoublingReport validate_upper_doubling(const DiscreteSpace& space, const DominatingFunction& lambda) {
  UpperDoublingReport rep;
  const std::size_t n = space.size();
  const double c_lambda = lambda.doubling_constant();
  const double slack = 1.0 + 1e-12;
  for (PointIndex x = 0; x < n; ++x) {
    const auto radii = candidate_radii(space, x);
    std::vector<double> sorted(space.distance_row(x).begin(), space.distance_row(x).end());
    std::vector<PointIndex> order(n);
    for (PointIndex i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](PointIndex a, PointIndex b) {
      return sorted[a] < sorted[b] || (sorted[a] == sorted[b] && a < b);
    });
    double prev = 0.0;
    std::size_t pos = 0;
    double mu = 0.0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double r = radii[k];
      while (pos < n && sorted[order[pos]] <= r) mu += space.mass(order[pos++]);
      const double lam = lambda(x, r);
      if (!(lam > 0.0) || !std::isfinite(lam)) rep.positive = false;
      if (k > 0 && lam < prev) rep.monotone = false;
      prev = lam;
      if (lambda(x, 2.0 * r) > c_lambda * lam * slack) rep.doubling = false;
      const double ratio = lam > 0.0 ? mu / lam : std::numeric_limits<double>::infinity();
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.witness_center = x;
        rep.witness_radius = r;
      }
    }
  }
  rep.dominated = rep.worst_ratio <= slack;

  // Property (v) at the two extreme admissible radii r = d(x, y) and r = diameter.
  const double diam = std::max(space.diameter(), epsilon_min(space));
  for (PointIndex x = 0; x < n; ++x)
    for (PointIndex y = 0; y < n; ++y) {
      if (x == y) continue;
      const double d = std::max(space.distance(x, y), epsilon_min(space));
      for (double r : {d, diam}) {
        const double a = lambda(x, r), b = lambda(y, r);
        if (b > 0.0) rep.comparability = std::max(rep.comparability, a / b);
      }
    }
  return rep;
}

GeometricDoublingEstimate validate_geometric_doubling(const DiscreteSpace& space) {
  GeometricDoublingEstimate est;
  const std::size_t n = space.size();
  std::vector<PointIndex> order(n);
  std::vector<char> covered;
  for (PointIndex c = 0; c < n; ++c) {
    const auto row = space.distance_row(c);
    for (PointIndex i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](PointIndex a, PointIndex b) { return row[a] < row[b] || (row[a] == row[b] && a < b); });
    for (double r : candidate_radii(space, c)) {
      std::size_t count = 0;
      while (count < n && row[order[count]] <= r) ++count;
      covered.assign(count, 0);
      std::size_t balls = 0;
      for (std::size_t i = 0; i < count; ++i) {
        if (covered[i]) continue;
        ++balls;
        const auto yrow = space.distance_row(order[i]);
        for (std::size_t j = i; j < count; ++j)
          if (!covered[j] && yrow[order[j]] <= r / 2.0) covered[j] = 1;
      }
      if (balls > est.covering_number) {
        est.covering_number = balls;
        est.witness_center = c;
        est.witness_radius = r;
      }
    }
  }
  est.dimension = std::log2(static_cast<double>(est.covering_number));
  return est;
}

}  // namespace nhcz
