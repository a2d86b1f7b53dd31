#include <doctest.h>

#include <chrono>
#include <sstream>

#include "nhcz/errors.hpp"
#include "nhcz/harness.hpp"
#include "oracles.hpp"

using namespace nhcz;

TEST_CASE("generation is deterministic") {
  const auto a = generate("grid", 300, 7);
  const auto b = generate("grid", 300, 7);
  CHECK(to_json(a) == to_json(b));
  for (const auto& kind : scenario_kinds()) {
    const auto x = generate(kind, 40, 3);
    const auto y = generate(kind, 40, 3);
    CHECK(to_json(x).dump() == to_json(y).dump());
    const auto z = generate(kind, 40, 4);
    if (kind != "line3-canonical" && kind != "grid") CHECK(to_json(x).dump() != to_json(z).dump());
  }
}

TEST_CASE("line3 canonical scenario") {
  const auto sc = generate("line3-canonical", 99, 5);
  REQUIRE(sc.space.size() == 3);
  CHECK(sc.space.distance(0, 2) == 3.0);
  CHECK(sc.space.total_mass() == 3.0);
  CHECK(sc.kernel_name == "antisymmetric-lambda");
  CHECK(sc.lambda(0, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("every kind satisfies upper doubling") {
  for (const auto& kind : scenario_kinds()) {
    const auto sc = generate(kind, 64, 7);
    CHECK(sc.space.size() == (kind == "line3-canonical" ? 3 : 64));
    CHECK(validate_upper_doubling(sc.space, sc.lambda).passed());
    CHECK(run_check("upper_doubling", sc, SuiteConfig{}).passed());
  }
}

TEST_CASE("cluster-spike is non-doubling with a recorded witness") {
  const auto sc = generate("cluster-spike", 128, 7);
  CHECK(validate_upper_doubling(sc.space, sc.lambda).passed());
  REQUIRE(sc.info.contains("non_doubling"));
  const auto w = sc.info["non_doubling"];
  const Ball b{w.at("center").get<PointIndex>(), w.at("radius").get<double>()};
  const double ratio = oracle::measure(sc.space, b.dilate(2.0)) / oracle::measure(sc.space, b);
  CHECK(ratio == doctest::Approx(w.at("max_doubling_ratio").get<double>()));
  CHECK(ratio > 1000.0);
}

TEST_CASE("scenario json round-trip and regeneration") {
  const auto sc = generate("bergman-sample", 32, 2);
  const auto back = scenario_from_json(to_json(sc));
  CHECK(back.id() == sc.id());
  CHECK(to_json(back).dump() == to_json(sc).dump());
  const auto regen = scenario_from_json({{"kind", "power-floor-line"}, {"size", 20}, {"seed", 1}});
  CHECK(to_json(regen).dump() == to_json(generate("power-floor-line", 20, 1)).dump());
}

TEST_CASE("invalid requests throw") {
  CHECK_THROWS_AS(generate("torus", 10, 1), ArgumentError);
  CHECK_THROWS_AS(generate("grid", 0, 1), ParameterError);
  const auto sc = generate("grid", 10, 1);
  CHECK_THROWS_AS(scenario_function(sc, "noise", 1), ArgumentError);
  CHECK_THROWS_AS(run_check("no_such_check", sc, SuiteConfig{}), ArgumentError);
}

TEST_CASE("function families") {
  const auto sc = generate("grid", 50, 3);
  for (const char* fam : {"random-sign", "mean-zero", "gaussian", "spike", "indicator", "smooth"}) {
    const auto f = scenario_function(sc, fam, 4);
    CHECK(f.size() == 50);
    CHECK(f == scenario_function(sc, fam, 4));
  }
  const auto mz = scenario_function(sc, "mean-zero", 1);
  double s = 0.0;
  for (PointIndex x = 0; x < 50; ++x) s += mz[x] * sc.space.mass(x);
  CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("empty suite") {
  const auto r = run_suite(SuiteConfig{});
  CHECK(r.records.empty());
  CHECK(r.passed());
  CHECK(r.to_jsonl().empty());
}

TEST_CASE("full suite on line3 is quick and green") {
  SuiteConfig c;
  c.scenarios = {{"line3-canonical", 3, 7}};
  c.checks = {"all"};
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_suite(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.records.size() == check_names().size());
  CHECK(r.passed());
  for (const auto& rec : r.records)
    for (const auto& msg : rec.report.failures) MESSAGE(rec.report.check << ": " << msg);
  CHECK(secs < 1.0);
}

TEST_CASE("injected fault fails cz4") {
  SuiteConfig c;
  c.scenarios = {{"cluster-spike", 64, 7}};
  c.checks = {"cz"};
  c.inject_fault = true;
  const auto r = run_suite(c);
  REQUIRE(r.records.size() == 1);
  CHECK_FALSE(r.passed());
  CHECK(r.failed_count() == 1);
  CHECK_FALSE(r.records[0].report.assertions.at("injected_fault_cz4"));
  c.inject_fault = false;
  CHECK(run_suite(c).passed());
}

TEST_CASE("config parsing and output formats") {
  const auto cfg = SuiteConfig::from_json(nlohmann::json::parse(R"({
    "seed": 3,
    "scenarios": [{"kind": "grid", "sizes": [16, 32]}, {"kind": "line3-canonical"}],
    "checks": ["covering", "hardy_l1"],
    "pair_cap": 500, "drift": true
  })"));
  REQUIRE(cfg.scenarios.size() == 3);
  CHECK(cfg.scenarios[0].size == 16);
  CHECK(cfg.scenarios[1].size == 32);
  CHECK(cfg.scenarios[1].seed == 3);
  CHECK(cfg.scenarios[2].size == 3);
  CHECK(cfg.pairs.pair_cap == 500);
  CHECK(SuiteConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());

  const auto r = run_suite(cfg);
  CHECK(r.records.size() == 6);
  CHECK(r.passed());
  // hardy_l1 carries a constant compared between sizes 16 and 32.
  CHECK_FALSE(r.drift.empty());
  for (const auto& d : r.drift) {
    CHECK(d.size_small == 16);
    CHECK(d.size_large == 32);
  }

  std::istringstream lines(r.to_jsonl(false));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK_FALSE(j.contains("wall_ms"));
    ++n;
  }
  CHECK(n == r.records.size() + r.drift.size());
  CHECK(r.to_jsonl(false) == run_suite(cfg).to_jsonl(false));

  const auto csv = r.to_csv();
  CHECK(csv.rfind("scenario,kind,size,seed,check,passed,vacuous,exact,key,value\n", 0) == 0);
}

TEST_CASE("drift comparison flags large factors") {
  SuiteRecord a, b;
  a.kind = b.kind = "grid";
  a.seed = b.seed = 1;
  a.size = 64;
  b.size = 128;
  a.report.check = b.report.check = "x";
  a.report.set("constant", 1.0);
  b.report.set("constant", 2.5);
  a.report.set("other", 1.0);
  b.report.set("other", 100.0);
  const auto d = compare_sizes({a, b}, 2.0);
  REQUIRE(d.size() == 1);
  CHECK(d[0].factor == doctest::Approx(2.5));
  CHECK(d[0].flagged);
}
