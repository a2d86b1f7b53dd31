#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhcz/ball_index.hpp"
#include "nhcz/mspace.hpp"
#include "nhcz/report.hpp"

namespace nhcz {

using Complex = std::complex<double>;
using ComplexFunction = std::vector<Complex>;

/// Off-diagonal kernel K(x, y), complex in general. Real kernels have zero imaginary part.
class Kernel {
 public:
  using Rule = std::function<Complex(PointIndex, PointIndex)>;

  Kernel(std::string name, Rule rule, bool complex_valued = false, double claimed_delta = 1.0,
         std::optional<double> claimed_size = std::nullopt);

  Complex operator()(PointIndex x, PointIndex y) const { return rule_(x, y); }
  const std::string& name() const { return name_; }
  bool is_complex() const { return complex_; }
  double claimed_delta() const { return delta_; }
  std::optional<double> claimed_size() const { return size_; }

 private:
  std::string name_;
  Rule rule_;
  bool complex_ = false;
  double delta_ = 1.0;
  std::optional<double> size_;
};

/// Built-in kernels by name: "bergman" (param m), "inverse-lambda", "antisymmetric-lambda",
/// "zero", "constant" (param value). The returned kernel refers to space and lambda,
/// which must outlive it.
Kernel make_kernel(const std::string& name, const DiscreteSpace& space, const DominatingFunction& lambda,
                   const nlohmann::json& params = nlohmann::json::object());
std::vector<std::string> kernel_names();

FunctionOnSpace real_part(std::span<const Complex> g);
FunctionOnSpace imag_part(std::span<const Complex> g);
FunctionOnSpace modulus(std::span<const Complex> g);

/// T_eps f(x) = sum over d(x, y) >= eps of K(x, y) f(y) mass(y).
ComplexFunction apply_truncated(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f,
                                double epsilon);
/// T_{epsilon_min} f: every off-diagonal term (points at distance zero excluded).
ComplexFunction apply_operator(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f);

/// T_* f(x) = max over the candidate radii at x of |T_eps f(x)| (T_eps is constant
/// in eps between consecutive distances).
FunctionOnSpace maximal_truncated(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f);

/// [b, T_eps] f = b T_eps f - T_eps (b f).
ComplexFunction commutator_apply(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> b,
                                 std::span<const double> f, double epsilon);

struct KernelSizeFit {
  /// Smallest C with |K(x, y)| <= C min{1 / lambda(x, d), 1 / lambda(y, d)}.
  double c_fit = 0.0;
  PointIndex worst_x = 0;
  PointIndex worst_y = 0;
  std::size_t pairs = 0;
};
KernelSizeFit validate_kernel_size(const DiscreteSpace& space, const Kernel& kernel,
                                   const DominatingFunction& lambda);

struct KernelHolderFit {
  /// No triple with 0 < d(x, x') <= shrink d(x, y).
  bool empty = true;
  double delta = 1.0;
  /// Smallest C with |K(x,y) - K(x',y)| + |K(y,x) - K(y,x')| <= C (d(x,x') / d(x,y))^delta / lambda(x, d(x,y)).
  double c_fit = 0.0;
  /// Largest delta in (0, 1] whose fitted constant stays within ceiling (0 if none).
  double delta_fit = 0.0;
  double ceiling = 0.0;
  PointIndex worst_x = 0;
  PointIndex worst_xp = 0;
  PointIndex worst_y = 0;
  std::size_t triples = 0;

  /// Fitted constant for an arbitrary exponent (from the retained Pareto frontier).
  double constant_for(double delta) const;
  /// (-log ratio, log amplitude) frontier of the triples.
  std::vector<std::pair<double, double>> frontier;
};

/// delta defaults to the kernel's claimed exponent; ceiling <= 0 means 2 C(0).
KernelHolderFit validate_kernel_holder(const DiscreteSpace& space, const Kernel& kernel,
                                       const DominatingFunction& lambda, double shrink = 0.5,
                                       std::optional<double> delta = std::nullopt, double ceiling = 0.0);

struct BergmanConfig {
  std::size_t n = 1;
  double m = 1.0;
  /// Points of the closed unit ball of C^n as interleaved (re, im) tuples, |x| > 0.
  std::vector<std::vector<double>> points;
  /// Boundary sample size for delta(x) = d(x, complement); 0 means 256 n.
  std::size_t boundary_samples = 0;
  std::uint64_t seed = 1;
};

struct BergmanInstance {
  DiscreteSpace space;
  DominatingFunction lambda;
  Kernel kernel;
  /// delta(x) per point.
  std::vector<double> boundary_distance;
  /// Common mass of every point.
  double mass = 0.0;
};

/// Space with the regular quasi-distance, lambda(x, r) = max{delta(x)^m, r^m}, uniform
/// masses scaled to the largest value keeping mu(B(x, r)) <= lambda(x, r) on the grid,
/// and K(x, y) = (1 - conj(x).y)^(-m).
BergmanInstance bergman_kernel(const BergmanConfig& config);

/// Componentwise Bergman kernel value (1 - conj(x).y)^(-m).
Complex bergman_kernel_value(std::span<const double> x, std::span<const double> y, double m);

/// T_* f(x) <= C (M_{eta,6}(T f)(x) + M_(5) f(x)): per-point ratios, max reported as the constant.
CheckReport cotlar_check(const BallIndex& index, const Kernel& kernel, std::span<const double> f, double eta);

/// max over levels t of t mu{|T f| > t} / ||f||_1.
CheckReport weak11_check(const DiscreteSpace& space, const Kernel& kernel, std::span<const double> f,
                         std::span<const double> levels);

}  // namespace nhcz
