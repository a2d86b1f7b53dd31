#include <doctest.h>

#include <random>

#include "nhcz/errors.hpp"
#include "nhcz/fspaces.hpp"
#include "nhcz/harness.hpp"
#include "nhcz/maximal.hpp"
#include "oracles.hpp"

using namespace nhcz;

namespace {

DiscreteSpace line3() { return DiscreteSpace::from_coordinates({{0.0}, {1.0}, {3.0}}, {1.0, 1.0, 1.0}); }
DominatingFunction line3_lambda() { return DominatingFunction::floored_power(4.0, 1.0, 0.25, 3); }

const DoublingParams kParams{6.0, 217.0, 217.0};
const PairScanOptions kExact{std::size_t{1} << 40, 1};

std::vector<double> random_f(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> f(n);
  for (auto& v : f) v = g(rng);
  return f;
}

}  // namespace

TEST_CASE("rbmo of a constant is zero") {
  const auto s = line3();
  const auto est = rbmo_estimate(s, line3_lambda(), std::vector<double>(3, 4.0), kParams, kExact);
  CHECK(est.c_b == doctest::Approx(0.0));
  CHECK(est.c_c == doctest::Approx(0.0));
  CHECK(est.c_canonical == doctest::Approx(0.0));
  CHECK(est.exact);
}

TEST_CASE("rbmo oscillation constant matches the oracle") {
  const auto s = line3();
  const std::vector<double> ind{1.0, 0.0, 0.0};
  CHECK(rbmo_estimate(s, line3_lambda(), ind, kParams, kExact).c_b ==
        doctest::Approx(oracle::rbmo_cb(s, line3_lambda(), ind)).epsilon(1e-12));
  for (const char* kind : {"grid", "cluster-spike", "power-floor-line", "bergman-sample"}) {
    const auto sc = generate(kind, 20, 4);
    const BallIndex index(sc.space, sc.lambda);
    const double beta0 = default_beta0(sc.lambda);
    const auto f = random_f(20, 9);
    const auto est = rbmo_estimate(index, f, {6.0, beta0, beta0}, kExact);
    CHECK(est.exact);
    CHECK(est.c_b == doctest::Approx(oracle::rbmo_cb(sc.space, sc.lambda, f)).epsilon(1e-12));
  }
}

TEST_CASE("rbmo is seminorm-like under affine maps") {
  const auto sc = generate("power-floor-line", 24, 2);
  const BallIndex index(sc.space, sc.lambda);
  const auto f = random_f(24, 1);
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = -3.0 * f[i] + 7.0;
  const double a = rbmo_estimate(index, f, kParams, kExact).c_b;
  const double b = rbmo_estimate(index, g, kParams, kExact).c_b;
  CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-10));
}

TEST_CASE("john-nirenberg check") {
  const auto sc = generate("grid", 40, 1);
  const BallIndex index(sc.space, sc.lambda);
  const auto flat = john_nirenberg_check(index, std::vector<double>(40, 2.0), 1.0, 6.0, kParams, kExact);
  CHECK(flat.vacuous);
  const auto f = random_f(40, 5);
  const auto p1 = john_nirenberg_check(index, f, 1.0, 6.0, kParams, kExact);
  CHECK(p1.passed());
  CHECK(p1.get("constant") <= 1.0 + 1e-9);
  const auto p2 = john_nirenberg_check(index, f, 2.0, 6.0, kParams, kExact);
  CHECK(std::isfinite(p2.get("constant")));
  CHECK(p2.get("constant") > 0.0);
  CHECK_THROWS_AS(john_nirenberg_check(index, f, 0.5, 6.0, kParams), ParameterError);
}

TEST_CASE("random atomic blocks are valid") {
  for (const auto& kind : scenario_kinds()) {
    const auto sc = generate(kind, 48, 3);
    const BallIndex index(sc.space, sc.lambda);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
      const auto blk = random_atomic_block(index, rng);
      const auto v = atomic_block_validate(sc.space, sc.lambda, blk);
      CHECK(v.valid);
      for (const auto& msg : v.failures) MESSAGE(msg);
      double integral = 0.0;
      const auto val = blk.value(sc.space.size());
      for (PointIndex x = 0; x < sc.space.size(); ++x) integral += val[x] * sc.space.mass(x);
      CHECK(std::abs(integral) <= 1e-9 * v.norm);
    }
  }
}

TEST_CASE("block validation reports a size violation") {
  const auto sc = generate("cluster-spike", 48, 3);
  const BallIndex index(sc.space, sc.lambda);
  std::mt19937_64 rng(2);
  auto blk = random_atomic_block(index, rng);
  REQUIRE(blk.terms.size() == 2);
  // Same value, atom 1% over its bound.
  for (auto& v : blk.terms[1].atom) v *= 1.01;
  blk.terms[1].coefficient /= 1.01;
  const auto v = atomic_block_validate(sc.space, sc.lambda, blk);
  CHECK_FALSE(v.valid);
  CHECK(v.violating_term == 1);
  CHECK(v.margin == doctest::Approx(0.01).epsilon(1e-6));

  AtomicBlock empty;
  empty.host = {0, 1.0};
  const auto e = atomic_block_validate(sc.space, sc.lambda, empty);
  CHECK(e.valid);
  CHECK(e.norm == 0.0);

  auto outside = random_atomic_block(index, rng);
  outside.terms[0].ball = {outside.terms[0].ball.center, 1e6};
  CHECK_FALSE(atomic_block_validate(sc.space, sc.lambda, outside).valid);
}

TEST_CASE("atomic blocks round-trip through json") {
  const auto sc = generate("grid", 32, 1);
  const BallIndex index(sc.space, sc.lambda);
  std::mt19937_64 rng(4);
  const auto blk = random_atomic_block(index, rng);
  const auto back = AtomicBlock::from_json(blk.to_json());
  CHECK(back.host == blk.host);
  REQUIRE(back.terms.size() == blk.terms.size());
  for (std::size_t j = 0; j < blk.terms.size(); ++j) {
    CHECK(back.terms[j].coefficient == blk.terms[j].coefficient);
    CHECK(back.terms[j].atom == blk.terms[j].atom);
  }
}

TEST_CASE("hardy decomposition from cz") {
  const auto sc = generate("cluster-spike", 96, 5);
  const BallIndex index(sc.space, sc.lambda);
  const double beta0 = default_beta0(sc.lambda);
  const DoublingParams params{6.0, beta0, beta0};

  const auto zero = hardy_from_cz(index, std::vector<double>(96, 0.0), 1.0, 1.0, params);
  CHECK(zero.blocks.empty());
  CHECK(zero.norm_upper == 0.0);

  std::vector<PointIndex> light;
  for (PointIndex x = 0; x < 96; ++x)
    if (sc.space.mass(x) > 0.0 && sc.space.mass(x) < sc.space.total_mass() / (8.0 * beta0)) light.push_back(x);
  REQUIRE(light.size() >= 2);
  const PointIndex a = light.front(), b = light.back();
  std::vector<double> f(96, 0.0);
  f[a] = 8.0;
  f[b] = -8.0 * sc.space.mass(a) / sc.space.mass(b);
  const double lmin = beta0 * lp_norm(sc.space, f, 1.0) / sc.space.total_mass();
  const auto h = hardy_from_cz(index, f, 1.2 * lmin, 1.0, params);
  CHECK_FALSE(h.blocks.empty());
  CHECK(h.blocks.size() == h.decomposition.blocks.size());
  double sum = 0.0;
  for (const auto& blk : h.blocks) {
    const auto v = atomic_block_validate(sc.space, sc.lambda, blk);
    CHECK(v.valid);
    sum += v.norm;
  }
  CHECK(h.norm_upper == doctest::Approx(sum));

  f[a] += 1.0;
  CHECK_THROWS_AS(hardy_from_cz(index, f, 1.2 * lmin, 1.0, params), ArgumentError);
}

TEST_CASE("duality pairing") {
  const auto sc = generate("grid", 48, 2);
  const BallIndex index(sc.space, sc.lambda);
  std::mt19937_64 rng(8);
  const auto blk = random_atomic_block(index, rng);
  const auto flat = duality_pairing_check(index, blk, std::vector<double>(48, 3.0), kParams);
  CHECK(flat.passed());
  CHECK(flat.get("constant") == 0.0);

  AtomicBlock empty;
  empty.host = {0, 1.0};
  CHECK(duality_pairing_check(index, empty, random_f(48, 1), kParams).vacuous);

  const auto g = random_f(48, 3);
  const auto rep = duality_pairing_check(index, blk, g, kParams, kExact);
  const auto val = blk.value(48);
  double pairing = 0.0;
  for (PointIndex x = 0; x < 48; ++x) pairing += val[x] * g[x] * sc.space.mass(x);
  CHECK(rep.get("pairing") == doctest::Approx(pairing));
  CHECK(rep.get("constant") ==
        doctest::Approx(std::abs(pairing) / (rep.get("block_norm") * oracle::rbmo_cb(sc.space, sc.lambda, g))));
}

TEST_CASE("chain inequality") {
  const auto sc = generate("grid", 40, 1);
  const BallIndex index(sc.space, sc.lambda);
  const std::vector<double> two{1.0, 2.0};
  const auto short_chain = chain_inequality_check(index, 0, two);
  CHECK(short_chain.passed());
  CHECK(short_chain.vacuous);
  CHECK_THROWS_AS(chain_inequality_check(index, 0, std::vector<double>{2.0, 1.0}), ArgumentError);

  std::vector<double> radii;
  for (double r = 0.5; r < 40.0; r *= 1.7) radii.push_back(r);
  const auto rep = chain_inequality_check(index, 20, radii);
  CHECK(rep.passed());
}

TEST_CASE("chain inequality with atoms on shared spheres") {
  // lambda = 1 below radius 10, atoms of mass 1.5 at distances 1 and 2 from the center.
  const auto s = DiscreteSpace::from_coordinates({{0.0}, {1.0}, {2.0}}, {1.5, 1.5, 1.5});
  const auto lam = DominatingFunction::floored_power(0.1, 1.0, 10.0, 3);
  const BallIndex index(s, lam);
  const std::vector<double> radii{0.5, 1.0, 2.0, 3.0};
  double lhs = 0.0;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) lhs += oracle::k_coef(s, lam, {0, radii[i]}, {0, radii[i + 1]});
  const double whole = oracle::k_coef(s, lam, {0, 0.5}, {0, 3.0});
  CHECK(lhs == doctest::Approx(9.0));
  CHECK(whole == doctest::Approx(4.0));
  const auto rep = chain_inequality_check(index, 0, radii);
  CHECK(rep.get("runs") == 1.0);
  CHECK(rep.get("runs_with_shared_spheres") == 1.0);
  CHECK(rep.get("literal_failures_with_shared_spheres") == 1.0);
  CHECK(rep.get("max_ratio") == doctest::Approx(9.0 / 8.0));
  CHECK(rep.passed());
}

TEST_CASE("commutator and image checks") {
  const auto sc = generate("bergman-sample", 32, 3);
  const BallIndex index(sc.space, sc.lambda);
  const auto kernel = scenario_kernel(sc);
  const double beta0 = default_beta0(sc.lambda);
  const DoublingParams params{6.0, beta0, beta0};
  const auto f = random_f(32, 2);
  const auto flat_b = commutator_pointwise_check(index, kernel, std::vector<double>(32, 1.0), f, 2.0, params);
  CHECK(flat_b.vacuous);
  CHECK(flat_b.get("constant") == 0.0);
  const auto zero_f = commutator_pointwise_check(index, kernel, f, std::vector<double>(32, 0.0), 2.0, params);
  CHECK(zero_f.vacuous);
  const auto rep = commutator_pointwise_check(index, kernel, random_f(32, 7), f, 2.0, params);
  CHECK(rep.passed());
  CHECK(std::isfinite(rep.get("constant")));
  CHECK_THROWS_AS(commutator_pointwise_check(index, kernel, f, f, 1.0, params), ParameterError);

  CHECK(rbmo_image_check(index, kernel, std::vector<double>(32, 0.0), params).vacuous);
  const auto img = rbmo_image_check(index, kernel, f, params);
  CHECK(img.get("constant") > 0.0);

  std::mt19937_64 rng(1);
  const auto blk = random_atomic_block(index, rng);
  const auto h = hardy_l1_check(sc.space, sc.lambda, kernel, blk);
  CHECK(h.passed());
  CHECK(h.get("constant") > 0.0);
}
