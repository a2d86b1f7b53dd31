#include <doctest.h>

#include <random>

#include "nhcz/czop.hpp"
#include "nhcz/harness.hpp"
#include "nhcz/maximal.hpp"
#include "oracles.hpp"

using namespace nhcz;

namespace {

std::vector<double> random_f(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> f(n);
  for (auto& v : f) v = g(rng);
  return f;
}

BergmanConfig disc_config(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BergmanConfig cfg;
  cfg.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = 0.1 + 0.85 * u(rng), t = 2.0 * M_PI * u(rng);
    cfg.points.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return cfg;
}

double holder_oracle(const DiscreteSpace& s, const Kernel& k, const DominatingFunction& lam, double delta) {
  double best = 0.0;
  for (PointIndex x = 0; x < s.size(); ++x)
    for (PointIndex xp = 0; xp < s.size(); ++xp)
      for (PointIndex y = 0; y < s.size(); ++y) {
        const double dxy = s.distance(x, y), dxx = s.distance(x, xp);
        if (!(dxy > 0.0) || !(dxx > 0.0) || dxx > 0.5 * dxy) continue;
        const double lhs = std::abs(k(x, y) - k(xp, y)) + std::abs(k(y, x) - k(y, xp));
        best = std::max(best, lhs * lam(x, dxy) / std::pow(dxx / dxy, delta));
      }
  return best;
}

}  // namespace

TEST_CASE("truncated operator basics") {
  const auto sc = generate("power-floor-line", 30, 1);
  const auto k = make_kernel("antisymmetric-lambda", sc.space, sc.lambda);
  const std::vector<double> zero(30, 0.0);
  for (const auto v : apply_truncated(sc.space, k, zero, 0.01)) CHECK(std::abs(v) == 0.0);
  const auto f = random_f(30, 2);
  for (const auto v : apply_truncated(sc.space, k, f, 2.0 * sc.space.diameter())) CHECK(std::abs(v) == 0.0);
  const auto t = apply_truncated(sc.space, k, f, 0.05);
  const auto o = oracle::truncated(sc.space, k, f, 0.05);
  for (std::size_t x = 0; x < 30; ++x) CHECK(std::abs(t[x] - o[x]) <= 1e-12 * (1.0 + std::abs(o[x])));
}

TEST_CASE("antisymmetric kernel cancels on equal masses") {
  const auto sc = generate("grid", 40, 1);
  const auto k = make_kernel("antisymmetric-lambda", sc.space, sc.lambda);
  const auto f = random_f(40, 3);
  const auto t = apply_operator(sc.space, k, f);
  double pairing = 0.0, scale = 0.0;
  for (std::size_t x = 0; x < 40; ++x) {
    pairing += t[x].real() * f[x] * sc.space.mass(x);
    scale += std::abs(t[x].real() * f[x]) * sc.space.mass(x);
  }
  CHECK(std::abs(pairing) <= 1e-12 * scale);
}

TEST_CASE("linearity and piecewise constancy in epsilon") {
  const auto inst = bergman_kernel(disc_config(25, 4));
  const auto& s = inst.space;
  const auto f1 = random_f(25, 1), f2 = random_f(25, 2);
  std::vector<double> sum(25);
  for (std::size_t i = 0; i < 25; ++i) sum[i] = 2.0 * f1[i] - f2[i];
  const double eps = 0.2;
  const auto a = apply_truncated(s, inst.kernel, f1, eps), b = apply_truncated(s, inst.kernel, f2, eps);
  const auto c = apply_truncated(s, inst.kernel, sum, eps);
  for (std::size_t x = 0; x < 25; ++x) CHECK(std::abs(c[x] - (2.0 * a[x] - b[x])) <= 1e-12 * (1.0 + std::abs(c[x])));
  for (PointIndex x = 0; x < 25; ++x) {
    const auto r = oracle::radii(s, x);
    for (std::size_t i = 1; i < r.size(); ++i) {
      const double mid = 0.5 * (r[i - 1] + r[i]);
      CHECK(std::abs(apply_truncated(s, inst.kernel, f1, mid)[x] - apply_truncated(s, inst.kernel, f1, r[i])[x]) <=
            1e-12);
    }
  }
}

TEST_CASE("maximal truncation") {
  const auto inst = bergman_kernel(disc_config(20, 6));
  const auto& s = inst.space;
  const std::vector<double> zero(20, 0.0);
  for (const double v : maximal_truncated(s, inst.kernel, zero)) CHECK(v == 0.0);

  std::vector<double> spike(20, 0.0);
  spike[3] = 2.0;
  const auto ts = maximal_truncated(s, inst.kernel, spike);
  for (PointIndex x = 0; x < 20; ++x)
    if (x != 3 && s.distance(x, 3) > 0.0)
      CHECK(ts[x] == doctest::Approx(std::abs(inst.kernel(x, 3)) * 2.0 * s.mass(3)).epsilon(1e-12));

  const auto f = random_f(20, 9);
  const auto tf = maximal_truncated(s, inst.kernel, f);
  const auto o = oracle::maximal_truncated(s, inst.kernel, f);
  for (PointIndex x = 0; x < 20; ++x) {
    CHECK(tf[x] == doctest::Approx(o[x]).epsilon(1e-12));
    for (const double eps : {0.01, 0.3, 1.0}) CHECK(tf[x] >= std::abs(apply_truncated(s, inst.kernel, f, eps)[x]) - 1e-12);
  }
}

TEST_CASE("kernel size fit") {
  const auto sc = generate("cluster-spike", 30, 2);
  CHECK(validate_kernel_size(sc.space, make_kernel("zero", sc.space, sc.lambda), sc.lambda).c_fit == 0.0);
  const auto inv = make_kernel("inverse-lambda", sc.space, sc.lambda);
  const auto fit = validate_kernel_size(sc.space, inv, sc.lambda);
  CHECK(fit.c_fit >= 1.0);
  double oracle_c = 0.0;
  for (PointIndex x = 0; x < 30; ++x)
    for (PointIndex y = 0; y < 30; ++y) {
      const double d = sc.space.distance(x, y);
      if (d > 0.0) oracle_c = std::max(oracle_c, std::abs(inv(x, y)) * std::max(sc.lambda(x, d), sc.lambda(y, d)));
    }
  CHECK(fit.c_fit == doctest::Approx(oracle_c).epsilon(1e-14));
  // Shrinking the constant exposes the witness pair.
  const double d = sc.space.distance(fit.worst_x, fit.worst_y);
  const double bound = fit.c_fit * (1.0 - 1e-9) /
                       std::max(sc.lambda(fit.worst_x, d), sc.lambda(fit.worst_y, d));
  CHECK(std::abs(inv(fit.worst_x, fit.worst_y)) > bound);
}

TEST_CASE("kernel Holder fit") {
  const auto sc = generate("grid", 12, 1);
  const auto c = make_kernel("constant", sc.space, sc.lambda, {{"value", 3.0}});
  const auto fc = validate_kernel_holder(sc.space, c, sc.lambda);
  CHECK_FALSE(fc.empty);
  CHECK(fc.c_fit == 0.0);

  const auto two = DiscreteSpace::from_coordinates({{0.0}, {1.0}}, {1.0, 1.0});
  const auto lam2 = DominatingFunction::floored_power(3.0, 1.0, 1.0, 2);
  CHECK(validate_kernel_holder(two, make_kernel("inverse-lambda", two, lam2), lam2).empty);

  const auto inst = bergman_kernel(disc_config(24, 3));
  const auto fit = validate_kernel_holder(inst.space, inst.kernel, inst.lambda);
  CHECK(fit.c_fit == doctest::Approx(holder_oracle(inst.space, inst.kernel, inst.lambda, 1.0)).epsilon(1e-12));
  CHECK(fit.delta_fit > 0.0);
  CHECK(fit.constant_for(0.5) == doctest::Approx(holder_oracle(inst.space, inst.kernel, inst.lambda, 0.5)).epsilon(1e-9));
  CHECK(fit.constant_for(fit.delta_fit) <= fit.ceiling * (1 + 1e-9));
}

TEST_CASE("bergman construction") {
  BergmanConfig one;
  one.points = {{0.5, 0.0}};
  const auto single = bergman_kernel(one);
  CHECK(single.boundary_distance[0] > 0.0);
  CHECK(validate_upper_doubling(single.space, single.lambda).passed());

  BergmanConfig pair;
  pair.points = {{0.5, 0.0}, {-0.5, 0.0}};
  const auto p = bergman_kernel(pair);
  CHECK(p.space.distance(0, 1) == doctest::Approx(2.0));
  CHECK(std::abs(p.kernel(0, 1) - Complex(0.8, 0.0)) < 1e-14);
  const std::vector<double> x{0.3, 0.4}, y{-0.1, 0.6};
  // (1 - conj(x) y)^-1 with conj(x) y = (0.3 - 0.4i)(-0.1 + 0.6i) = 0.21 + 0.22i.
  CHECK(std::abs(bergman_kernel_value(x, y, 1.0) - 1.0 / Complex(0.79, -0.22)) < 1e-14);
  CHECK(bergman_quasi_distance(x, y) == doctest::Approx(std::abs(0.5 - std::sqrt(0.37)) +
                                                        std::abs(1.0 - Complex(0.21, 0.22) / (0.5 * std::sqrt(0.37)))));

  const auto big = bergman_kernel(disc_config(100, 5));
  CHECK(validate_upper_doubling(big.space, big.lambda).passed());
  CHECK(big.kernel.is_complex());
}

TEST_CASE("bergman size constant is stable under resampling") {
  const auto a = bergman_kernel(disc_config(50, 1));
  const auto b = bergman_kernel(disc_config(50, 2));
  const double ca = validate_kernel_size(a.space, a.kernel, a.lambda).c_fit;
  const double cb = validate_kernel_size(b.space, b.kernel, b.lambda).c_fit;
  CHECK(std::isfinite(ca));
  CHECK(std::max(ca, cb) / std::min(ca, cb) <= 2.0);
}

TEST_CASE("commutator") {
  const auto inst = bergman_kernel(disc_config(20, 8));
  const auto& s = inst.space;
  const auto f = random_f(20, 1), g = random_f(20, 2), b = random_f(20, 3);
  const std::vector<double> cst(20, 4.0), zero(20, 0.0);
  for (const auto v : commutator_apply(s, inst.kernel, cst, f, 0.01)) CHECK(std::abs(v) <= 1e-12);
  for (const auto v : commutator_apply(s, inst.kernel, b, zero, 0.01)) CHECK(std::abs(v) == 0.0);
  std::vector<double> fg(20);
  for (std::size_t i = 0; i < 20; ++i) fg[i] = f[i] + g[i];
  const auto a1 = commutator_apply(s, inst.kernel, b, f, 0.01);
  const auto a2 = commutator_apply(s, inst.kernel, b, g, 0.01);
  const auto a3 = commutator_apply(s, inst.kernel, b, fg, 0.01);
  for (std::size_t x = 0; x < 20; ++x) CHECK(std::abs(a3[x] - a1[x] - a2[x]) <= 1e-12 * (1.0 + std::abs(a3[x])));
}

TEST_CASE("cotlar and weak (1,1) checks") {
  const auto inst = bergman_kernel(disc_config(40, 2));
  const BallIndex index(inst.space, inst.lambda);
  const std::vector<double> zero(40, 0.0);
  CHECK(cotlar_check(index, inst.kernel, zero, 0.5).vacuous);
  CHECK(weak11_check(inst.space, inst.kernel, zero, {}).vacuous);

  std::vector<double> atom(40, 0.0);
  atom[5] = 1.0;
  const auto c1 = cotlar_check(index, inst.kernel, atom, 0.5);
  CHECK(std::isfinite(c1.get("constant")));

  const auto f = random_f(40, 4);
  const auto c = cotlar_check(index, inst.kernel, f, 0.5);
  CHECK(std::isfinite(c.get("constant")));
  CHECK(c.get("constant") > 0.0);

  const auto tf = modulus(apply_operator(inst.space, inst.kernel, f));
  const double top = *std::max_element(tf.begin(), tf.end());
  const std::vector<double> above{top * 1.01};
  CHECK(weak11_check(inst.space, inst.kernel, f, above).get("constant") == 0.0);
  const auto w = weak11_check(inst.space, inst.kernel, f, {});
  CHECK(w.get("constant") > 0.0);
}
