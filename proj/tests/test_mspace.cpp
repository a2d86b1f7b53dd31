#include <doctest.h>

#include <random>

#include "nhcz/ball_index.hpp"
#include "nhcz/errors.hpp"
#include "nhcz/io.hpp"
#include "nhcz/mspace.hpp"
#include "oracles.hpp"

using namespace nhcz;

namespace {

DiscreteSpace line3() { return DiscreteSpace::from_coordinates({{0.0}, {1.0}, {3.0}}, {1.0, 1.0, 1.0}); }
DominatingFunction line3_lambda() { return DominatingFunction::floored_power(4.0, 1.0, 0.25, 3); }

DiscreteSpace random_space(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(n);
  std::vector<double> masses(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {u(rng), u(rng)};
    masses[i] = 0.1 + u(rng);
  }
  return DiscreteSpace::from_coordinates(std::move(pts), std::move(masses));
}

}  // namespace

TEST_CASE("ball_members on line3") {
  const auto s = line3();
  CHECK(ball_members(s, 1, 1.0) == std::vector<PointIndex>{0, 1});
  CHECK(ball_members(s, 1, 0.0) == std::vector<PointIndex>{1});
  CHECK(ball_members(s, 0, 10.0) == std::vector<PointIndex>{0, 1, 2});
}

TEST_CASE("zero radius keeps exact duplicates") {
  const auto s = DiscreteSpace::from_coordinates({{0.0}, {0.0}, {5.0}}, {1.0, 1.0, 1.0});
  CHECK(ball_members(s, 0, 0.0) == std::vector<PointIndex>{0, 1});
}

TEST_CASE("measure") {
  const auto s = line3();
  const std::vector<PointIndex> two{0, 1}, none{}, all{0, 1, 2};
  CHECK(measure(s, two) == 2.0);
  CHECK(measure(s, none) == 0.0);
  CHECK(measure(s, all) == 3.0);
  CHECK(s.total_mass() == 3.0);
}

TEST_CASE("candidate radii") {
  const auto s = line3();
  const auto r = candidate_radii(s, 1);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(1.0 / 216.0));
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 2.0);
  CHECK(epsilon_min(s) == doctest::Approx(1.0 / 216.0));

  const auto dup = DiscreteSpace::from_coordinates({{0.0}, {0.0}, {5.0}}, {1.0, 1.0, 1.0});
  const auto rd = candidate_radii(dup, 0);
  REQUIRE(rd.size() == 2);
  CHECK(rd[0] == doctest::Approx(5.0 / 216.0));
  CHECK(rd[1] == 5.0);

  const auto one = DiscreteSpace::from_coordinates({{0.3}}, {2.0});
  CHECK(candidate_radii(one, 0) == std::vector<double>{1.0});
}

TEST_CASE("candidate radii match the oracle on a random space") {
  const auto s = random_space(30, 3);
  for (PointIndex c = 0; c < s.size(); ++c) CHECK(candidate_radii(s, c) == oracle::radii(s, c));
}

TEST_CASE("validate_upper_doubling on line3") {
  const auto s = line3();
  const auto ok = validate_upper_doubling(s, line3_lambda());
  CHECK(ok.passed());
  CHECK(line3_lambda().doubling_constant() == 2.0);
  CHECK(ok.worst_ratio == 1.0);
  CHECK(ok.witness_center == 0);

  const auto bad = validate_upper_doubling(s, DominatingFunction::power_law(4.0, 1.0));
  CHECK_FALSE(bad.passed());
  CHECK_FALSE(bad.dominated);
  CHECK(bad.witness_radius == doctest::Approx(1.0 / 216.0));

  const auto one = DiscreteSpace::from_coordinates({{0.0}}, {0.5});
  CHECK(validate_upper_doubling(one, DominatingFunction::floored_power(1.0, 1.0, 0.5, 1)).passed());
}

TEST_CASE("validate_upper_doubling agrees with a direct scan") {
  const auto s = random_space(25, 11);
  const auto lam = DominatingFunction::floored_power(30.0, 2.0, 0.2, s.size());
  double worst = 0.0;
  for (const auto& b : oracle::all_balls(s)) worst = std::max(worst, oracle::measure(s, b) / lam(b.center, b.radius));
  const auto rep = validate_upper_doubling(s, lam);
  CHECK(rep.worst_ratio == doctest::Approx(worst).epsilon(1e-12));
  CHECK(rep.dominated == (worst <= 1.0));
}

TEST_CASE("geometric doubling estimates") {
  const auto g3 = validate_geometric_doubling(line3());
  CHECK(g3.covering_number <= 3);
  CHECK(g3.covering_number >= 1);

  const auto one = validate_geometric_doubling(DiscreteSpace::from_coordinates({{1.0}}, {1.0}));
  CHECK(one.covering_number == 1);
  CHECK(one.dimension == 0.0);

  auto grid = [](std::size_t n) {
    std::vector<std::vector<double>> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {static_cast<double>(i)};
    return DiscreteSpace::from_coordinates(std::move(pts), std::vector<double>(n, 1.0));
  };
  const auto a = validate_geometric_doubling(grid(16));
  const auto b = validate_geometric_doubling(grid(32));
  CHECK(a.covering_number == b.covering_number);
  CHECK(a.covering_number <= 3);
}

TEST_CASE("ball monotonicity and additivity") {
  const auto s = random_space(20, 5);
  for (PointIndex c = 0; c < s.size(); ++c) {
    const auto r = candidate_radii(s, c);
    for (std::size_t i = 1; i < r.size(); ++i) {
      const auto small = ball_members(s, c, r[i - 1]);
      const auto big = ball_members(s, c, r[i]);
      CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    }
  }
  const std::vector<PointIndex> a{0, 3, 5}, b{1, 2}, ab{0, 1, 2, 3, 5};
  CHECK(measure(s, ab) == doctest::Approx(measure(s, a) + measure(s, b)).epsilon(1e-15));
}

TEST_CASE("invalid spaces are rejected") {
  CHECK_THROWS_AS(DiscreteSpace::from_coordinates({}, {}), ArgumentError);
  CHECK_THROWS_AS(DiscreteSpace::from_coordinates({{0.0}, {1.0}}, {1.0, -1.0}), ArgumentError);
  CHECK_THROWS_AS(DiscreteSpace::from_coordinates({{0.0}, {1.0}}, {0.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(DiscreteSpace::from_coordinates({{0.0}, {1.0, 2.0}}, {1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(DiscreteSpace::from_matrix(2, {0.0, 1.0, 2.0, 0.0}, {1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(DiscreteSpace::from_matrix(2, {0.0, 1.0, 1.0, 0.0}, {1.0}), ArgumentError);
  // d(0,2) = 10 > d(0,1) + d(1,2) = 2.
  CHECK_THROWS_AS(DiscreteSpace::from_matrix(3, {0, 1, 10, 1, 0, 1, 10, 1, 0}, {1, 1, 1}), ArgumentError);
  CHECK_NOTHROW(DiscreteSpace::from_matrix(3, {0, 1, 10, 1, 0, 1, 10, 1, 0}, {1, 1, 1}, 5.0));
  CHECK_THROWS_AS(DominatingFunction::power_law(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(check_function(line3(), std::vector<double>{1.0, 2.0}), ArgumentError);
}

TEST_CASE("fit_quasi_constant") {
  const std::vector<double> d{0, 1, 10, 1, 0, 1, 10, 1, 0};
  CHECK(DiscreteSpace::fit_quasi_constant(3, d) == doctest::Approx(5.0));
}

TEST_CASE("ball index agrees with direct enumeration") {
  const auto s = random_space(24, 9);
  const auto lam = DominatingFunction::floored_power(30.0, 2.0, 0.2, s.size());
  const BallIndex index(s, lam);
  for (BallId b = 0; b < index.ball_count(); ++b) {
    const oracle::Ball ball{index.center_of(b), index.radius(b)};
    CHECK(index.measure(b) == doctest::Approx(oracle::measure(s, ball)).epsilon(1e-13));
    CHECK(index.member_count(b) == oracle::members(s, ball).size());
  }
  for (PointIndex c = 0; c < s.size(); ++c) {
    const auto r = oracle::radii(s, c);
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = i; j < r.size(); ++j)
        CHECK(index.k_coefficient(c, r[i], r[j]) ==
              doctest::Approx(oracle::k_coef(s, lam, {c, r[i]}, {c, r[j]})).epsilon(1e-12));
  }
}

TEST_CASE("space and lambda documents round-trip") {
  const auto s = DiscreteSpace::from_coordinates({{0.0, 1.0}, {2.0, 0.5}, {1.0, 1.0}}, {1.0, 0.5, 2.0});
  const auto back = space_from_json(to_json(s));
  REQUIRE(back.size() == s.size());
  for (PointIndex x = 0; x < s.size(); ++x) {
    CHECK(back.mass(x) == s.mass(x));
    for (PointIndex y = 0; y < s.size(); ++y) CHECK(back.distance(x, y) == s.distance(x, y));
  }
  const auto m = DiscreteSpace::from_matrix(2, {0.0, 2.0, 2.0, 0.0}, {1.0, 3.0});
  const auto mb = space_from_json(to_json(m));
  CHECK(mb.distance(0, 1) == 2.0);
  CHECK(mb.mass(1) == 3.0);

  const auto lam = DominatingFunction::floored_power(4.0, 1.0, {0.25, 0.5, 1.0});
  const auto lb = lambda_from_json(to_json(lam), 3);
  for (PointIndex x = 0; x < 3; ++x)
    for (const double r : {0.01, 0.3, 2.0}) CHECK(lb(x, r) == lam(x, r));
  CHECK_THROWS_AS(space_from_json({{"kind", "sphere"}}), ArgumentError);
  CHECK(function_from_json(nlohmann::json::parse("[1, 2.5]")) == std::vector<double>{1.0, 2.5});
}
