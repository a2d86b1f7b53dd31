#include <doctest.h>

#include <random>

#include "nhcz/errors.hpp"
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

void check_close(const std::vector<double>& got, const std::vector<double>& expect) {
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

}  // namespace

TEST_CASE("constant functions") {
  const auto s = line3();
  const auto lam = line3_lambda();
  const std::vector<double> f(3, -2.5);
  for (const double v : maximal_noncentered(s, lam, f, 1.0).values) CHECK(v == doctest::Approx(2.5));
  for (const double v : maximal_doubling(s, lam, f, kParams).values) CHECK(v == doctest::Approx(2.5));
  for (const double v : maximal_p(s, lam, f, 3.0, 1.0).values) CHECK(v == doctest::Approx(2.5));
  for (const double v : sharp_maximal(s, lam, f, kParams).values) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("singleton ball survives dilation by six") {
  const auto s = line3();
  const std::vector<double> f{0.0, 1.0, 0.0};
  const auto m = maximal_noncentered(s, line3_lambda(), f, 6.0);
  CHECK(m.values[1] == doctest::Approx(1.0));
  CHECK(m.witness[1].center == 1);
  CHECK(m.witness[1].radius == doctest::Approx(1.0 / 216.0));
}

TEST_CASE("line3 spike against the oracles") {
  const auto s = line3();
  const auto lam = line3_lambda();
  const std::vector<double> f{0.0, 0.0, 9.0};
  const auto n = maximal_doubling(s, lam, f, kParams);
  check_close(n.values, oracle::doubling_maximal(s, f, 217.0));
  CHECK(n.values[0] == doctest::Approx(3.0));
  check_close(sharp_maximal(s, lam, f, kParams, kExact).values, oracle::sharp(s, lam, f, 217.0));
  check_close(maximal_p(s, lam, f, 2.0, 5.0).values, oracle::maximal_p(s, f, 2.0, 5.0));
  const auto m1 = maximal_noncentered(s, lam, f, 1.0);
  for (PointIndex x = 0; x < 3; ++x) {
    CHECK(m1.values[x] >= std::abs(f[x]));
    CHECK(n.values[x] <= m1.values[x] * (1 + 1e-12));
  }
}

TEST_CASE("all operators match the oracles on random scenarios") {
  for (const char* kind : {"grid", "cluster-spike", "power-floor-line", "bergman-sample"}) {
    const auto sc = generate(kind, 20, 3);
    const BallIndex index(sc.space, sc.lambda);
    const double beta0 = default_beta0(sc.lambda);
    const DoublingParams p{6.0, beta0, beta0};
    const auto f = random_f(sc.space.size(), 17);
    for (const double rho : {1.0, 5.0, 6.0}) check_close(maximal_noncentered(index, f, rho).values, oracle::maximal(sc.space, f, rho));
    check_close(maximal_doubling(index, f, p).values, oracle::doubling_maximal(sc.space, f, beta0));
    check_close(maximal_p(index, f, 2.0, 5.0).values, oracle::maximal_p(sc.space, f, 2.0, 5.0));
    const auto ms = sharp_maximal(index, f, p, kExact);
    CHECK(ms.exact);
    check_close(ms.values, oracle::sharp(sc.space, sc.lambda, f, beta0));
  }
}

TEST_CASE("maximal_p with p = 1 equals the noncentered operator") {
  const auto sc = generate("power-floor-line", 30, 1);
  const auto f = random_f(30, 2);
  const BallIndex index(sc.space, sc.lambda);
  check_close(maximal_p(index, f, 1.0, 5.0).values, maximal_noncentered(index, f, 5.0).values);
  CHECK_THROWS_AS(maximal_p(index, f, 0.5, 5.0), ParameterError);
}

TEST_CASE("sampled pair scan stays below the exact value and is reproducible") {
  const auto sc = generate("cluster-spike", 48, 5);
  const BallIndex index(sc.space, sc.lambda);
  const auto f = random_f(48, 8);
  const auto exact = sharp_maximal(index, f, kParams, kExact);
  CHECK(exact.exact);
  const PairScanOptions tight{2, 99};
  const auto a = sharp_maximal(index, f, kParams, tight);
  const auto b = sharp_maximal(index, f, kParams, tight);
  CHECK_FALSE(a.exact);
  CHECK(a.pair_visited < a.pair_total);
  for (std::size_t x = 0; x < f.size(); ++x) {
    CHECK(a.values[x] <= exact.values[x] * (1 + 1e-12));
    CHECK(a.values[x] == b.values[x]);
    CHECK(a.first_term[x] == exact.first_term[x]);
  }
}

TEST_CASE("pointwise dominations") {
  for (const auto& kind : scenario_kinds()) {
    const auto sc = generate(kind, 40, 9);
    const BallIndex index(sc.space, sc.lambda);
    const double beta0 = default_beta0(sc.lambda);
    const DoublingParams p{6.0, beta0, beta0};
    const auto f = random_f(sc.space.size(), 4);
    std::vector<double> af(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) af[i] = std::abs(f[i]);
    const auto ms = sharp_maximal(index, f, p, kExact);
    const auto ms_abs = sharp_maximal(index, af, p, kExact);
    const auto m6 = maximal_noncentered(index, f, 6.0);
    const auto nf = maximal_doubling(index, f, p);
    for (std::size_t x = 0; x < f.size(); ++x) {
      CHECK(ms.values[x] <= (m6.values[x] + 3.0 * nf.values[x]) * (1 + 1e-9));
      CHECK(ms_abs.values[x] <= 5.0 * beta0 * ms.values[x] * (1 + 1e-9));
    }
  }
}

TEST_CASE("monotone in the dilation") {
  const auto sc = generate("bergman-sample", 40, 2);
  const BallIndex index(sc.space, sc.lambda);
  const auto f = random_f(40, 1);
  const auto a = maximal_noncentered(index, f, 2.0);
  const auto b = maximal_noncentered(index, f, 5.0);
  for (std::size_t x = 0; x < f.size(); ++x) CHECK(b.values[x] <= a.values[x]);
}

TEST_CASE("weak (1,1) with constant one") {
  for (const auto& kind : scenario_kinds()) {
    const auto sc = generate(kind, 64, 4);
    const BallIndex index(sc.space, sc.lambda);
    const auto f = random_f(sc.space.size(), 6);
    const auto m = maximal_noncentered(index, f, 5.0);
    const auto rep = maximal_weak11_check(index, f, level_grid(m.values));
    CHECK(rep.passed());
    CHECK(rep.get("constant") <= 1.0 + 1e-9);
  }
}

TEST_CASE("norms and level sets") {
  const auto s = DiscreteSpace::from_coordinates({{0.0}, {1.0}, {2.0}}, {1.0, 2.0, 0.0});
  const std::vector<double> f{1.0, -2.0, 100.0};
  CHECK(lp_norm(s, f, 1.0) == doctest::Approx(5.0));
  CHECK(lp_norm(s, f, 2.0) == doctest::Approx(3.0));
  CHECK(lp_norm(s, f, std::numeric_limits<double>::infinity()) == 2.0);
  CHECK(level_set_measure(s, f, 1.0) == 0.0);
  CHECK(level_set_measure(s, f, 0.5) == 1.0);
  const auto grid = level_grid(std::vector<double>{0.0, 1.0, 4.0});
  CHECK(grid.size() == 16);
  CHECK(grid.back() < 4.0);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("good lambda") {
  const auto sc = generate("grid", 32, 1);
  const BallIndex index(sc.space, sc.lambda);
  GoodLambdaParams gl;
  gl.lambdas = {0.1, 1.0};
  const std::vector<double> zero(32, 0.0);
  const auto z = good_lambda_check(index, zero, gl, kParams);
  for (const auto& row : z.witness["table"]) {
    CHECK(row["lhs"] == 0.0);
    CHECK(row["rhs"] == 0.0);
  }
  auto f = random_f(32, 3);
  double mean = 0.0;
  for (const double v : f) mean += v / 32.0;
  for (auto& v : f) v -= mean;
  gl.lambdas = level_grid(maximal_doubling(index, f, kParams).values);
  const auto rep = good_lambda_check(index, f, gl, kParams);
  CHECK(rep.witness["table"].size() == 16);
  CHECK(rep.get("worst_nu") <= 1.0);
  gl.delta = 1e3;
  CHECK_NOTHROW(good_lambda_check(index, f, gl, kParams));
  f[0] += 1.0;
  CHECK_THROWS_AS(good_lambda_check(index, f, gl, kParams), ArgumentError);
}
