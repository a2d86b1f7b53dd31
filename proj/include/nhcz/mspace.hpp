#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nhcz {

using PointIndex = std::size_t;

/// One real value per point, aligned with the point order of a space.
using FunctionOnSpace = std::vector<double>;

/// Largest dilation factor applied to any ball by the library (3 * 6^2).
inline constexpr double kMaxDilation = 108.0;

/// Point sets larger than this get a sampled quasi-triangle check at load.
inline constexpr std::size_t kExhaustiveTriangleLimit = 300;

enum class DistanceKind { Euclidean, Bergman };

std::string to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& name);

/// Finite metric (or quasi-metric) measure space with atomic measure.
///
/// Distances are materialized into a dense symmetric matrix at construction.
/// The quasi-triangle inequality d(x,z) <= A (d(x,y) + d(y,z)) is checked
/// exhaustively up to kExhaustiveTriangleLimit points and on a seeded sample
/// of triples above it.
class DiscreteSpace {
 public:
  /// Points as real tuples of a fixed dimension. For DistanceKind::Bergman the
  /// tuple holds (Re z_1, Im z_1, ..., Re z_n, Im z_n).
  static DiscreteSpace from_coordinates(std::vector<std::vector<double>> points,
                                        std::vector<double> masses,
                                        DistanceKind kind = DistanceKind::Euclidean,
                                        double quasi_constant = 1.0);

  /// Row-major symmetric matrix with zero diagonal.
  static DiscreteSpace from_matrix(std::size_t point_count, std::vector<double> distances,
                                   std::vector<double> masses, double quasi_constant = 1.0);

  std::size_t size() const { return n_; }
  double distance(PointIndex x, PointIndex y) const { return dist_[x * n_ + y]; }
  std::span<const double> distance_row(PointIndex x) const { return {dist_.data() + x * n_, n_}; }
  double mass(PointIndex x) const { return masses_[x]; }
  std::span<const double> masses() const { return masses_; }
  double total_mass() const { return total_mass_; }
  double quasi_constant() const { return quasi_constant_; }
  bool is_metric() const { return quasi_constant_ == 1.0; }

  bool has_coordinates() const { return !coords_.empty(); }
  std::size_t dimension() const { return dim_; }
  const std::vector<std::vector<double>>& coordinates() const { return coords_; }
  DistanceKind distance_kind() const { return kind_; }
  std::span<const double> distance_matrix() const { return dist_; }

  /// Smallest positive pairwise distance; nullopt if every distance is zero.
  std::optional<double> min_positive_distance() const { return min_positive_; }
  double diameter() const { return diameter_; }

  /// Smallest A with d(x,z) <= A (d(x,y) + d(y,z)) over all triples (exhaustive).
  static double fit_quasi_constant(std::size_t point_count, std::span<const double> distances);

 private:
  DiscreteSpace() = default;
  void finalize(double quasi_constant);

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  DistanceKind kind_ = DistanceKind::Euclidean;
  std::vector<std::vector<double>> coords_;
  std::vector<double> dist_;
  std::vector<double> masses_;
  double total_mass_ = 0.0;
  double quasi_constant_ = 1.0;
  std::optional<double> min_positive_;
  double diameter_ = 0.0;
};

/// Distance between two points of the closed unit ball of C^n under the
/// regular quasi-distance ||x| - |y|| + |1 - conj(x).y / (|x||y|)|.
/// Coordinates are interleaved (re, im) pairs.
double bergman_quasi_distance(std::span<const double> x, std::span<const double> y);

/// The dominating function lambda(x, r) of an upper doubling measure.
class DominatingFunction {
 public:
  enum class Family { PowerLaw, FlooredPower, Custom };
  using Rule = std::function<double(PointIndex, double)>;

  /// lambda(x, r) = c r^n.
  static DominatingFunction power_law(double c, double degree);
  /// lambda(x, r) = c max{floor(x), r}^n.
  static DominatingFunction floored_power(double c, double degree, std::vector<double> floors);
  /// Same floor at every point.
  static DominatingFunction floored_power(double c, double degree, double floor, std::size_t point_count);
  static DominatingFunction custom(std::string name, Rule rule, double doubling_constant, double degree);

  double operator()(PointIndex x, double r) const;

  Family family() const { return family_; }
  std::string family_name() const;
  /// C_lambda: lambda(x, 2r) <= C_lambda lambda(x, r).
  double doubling_constant() const { return doubling_constant_; }
  /// Doubling order n, with C_lambda = 2^n for the built-in families.
  double degree() const { return degree_; }
  double scale() const { return c_; }
  const std::vector<double>& floors() const { return floors_; }
  /// lambda(x, a r) = a^m lambda(x, r) for all a, r.
  bool is_homogeneous() const { return family_ == Family::PowerLaw; }
  const std::string& name() const { return name_; }

 private:
  Family family_ = Family::PowerLaw;
  double c_ = 1.0;
  double degree_ = 1.0;
  double doubling_constant_ = 2.0;
  std::vector<double> floors_;
  Rule rule_;
  std::string name_;
};

/// Throws ArgumentError unless f has one finite value per point.
void check_function(const DiscreteSpace& space, std::span<const double> f);

/// Closed ball { y : d(center, y) <= radius }, ascending point indices.
std::vector<PointIndex> ball_members(const DiscreteSpace& space, PointIndex center, double radius);

/// Sum of masses over the given points.
double measure(const DiscreteSpace& space, std::span<const PointIndex> members);

/// d_min^+ / (2 * kMaxDilation); 1.0 when the space has no positive distance.
double epsilon_min(const DiscreteSpace& space);

/// epsilon_min followed by the distinct positive distances from center, ascending.
/// A space without positive distances yields {1.0}.
std::vector<double> candidate_radii(const DiscreteSpace& space, PointIndex center);

struct UpperDoublingReport {
  bool positive = true;     // lambda(x, r) > 0
  bool monotone = true;     // r -> lambda(x, r) nondecreasing on the grid
  bool doubling = true;     // lambda(x, 2r) <= C_lambda lambda(x, r) on the grid
  bool dominated = true;    // mu(B(x, r)) <= lambda(x, r) on the grid
  double worst_ratio = 0.0; // max mu(B(x, r)) / lambda(x, r)
  PointIndex witness_center = 0;
  double witness_radius = 0.0;
  /// max lambda(x, r) / lambda(y, r) over d(x, y) <= r on the grid.
  double comparability = 1.0;

  bool passed() const { return positive && monotone && doubling && dominated; }
};

UpperDoublingReport validate_upper_doubling(const DiscreteSpace& space, const DominatingFunction& lambda);

struct GeometricDoublingEstimate {
  std::size_t covering_number = 1;  // N_est
  double dimension = 0.0;           // log2 N_est
  PointIndex witness_center = 0;
  double witness_radius = 0.0;
};

/// Greedy half-radius covers of every candidate ball, centers at member points.
GeometricDoublingEstimate validate_geometric_doubling(const DiscreteSpace& space);

}  // namespace nhcz
