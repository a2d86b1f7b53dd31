#include "nhcz/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "nhcz/covering.hpp"
#include "nhcz/czdecomp.hpp"
#include "nhcz/errors.hpp"
#include "nhcz/io.hpp"
#include "nhcz/maximal.hpp"

namespace nhcz {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return detail::splitmix64(s);
}

namespace {

constexpr double kTol = 1e-9;

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

/// c with mu(B(x, r)) <= max{mass(x), c r} on the candidate grid.
double fit_linear_scale(const DiscreteSpace& space) {
  double c = 0.0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    const auto row = space.distance_row(x);
    for (const double r : candidate_radii(space, x)) {
      double mu = 0.0;
      for (PointIndex y = 0; y < space.size(); ++y)
        if (row[y] <= r) mu += space.mass(y);
      if (mu > space.mass(x)) c = std::max(c, mu / r);
    }
  }
  return c > 0.0 ? c * (1.0 + 1e-9) : 1.0;
}

DominatingFunction floored_linear(const DiscreteSpace& space, double c) {
  std::vector<double> floors(space.size());
  for (PointIndex x = 0; x < space.size(); ++x) floors[x] = space.mass(x) / c;
  return DominatingFunction::floored_power(c, 1.0, std::move(floors));
}

/// Largest mu(2B) / mu(B) over candidate balls.
nlohmann::json non_doubling_witness(const DiscreteSpace& space) {
  double worst = 1.0;
  Ball arg;
  for (PointIndex x = 0; x < space.size(); ++x)
    for (const double r : candidate_radii(space, x)) {
      const double mu = ball_measure(space, {x, r});
      if (!(mu > 0.0)) continue;
      const double ratio = ball_measure(space, {x, 2.0 * r}) / mu;
      if (ratio > worst) {
        worst = ratio;
        arg = {x, r};
      }
    }
  return {{"max_doubling_ratio", worst}, {"center", arg.center}, {"radius", arg.radius}};
}

}  // namespace

std::string Scenario::id() const { return kind + "-" + std::to_string(size) + "-" + std::to_string(seed); }

std::vector<std::string> scenario_kinds() {
  return {"line3-canonical", "grid", "cluster-spike", "power-floor-line", "bergman-sample"};
}

Scenario generate(const std::string& kind, std::size_t size, std::uint64_t seed) {
  if (size == 0) throw ParameterError("scenario size must be at least 1");
  std::mt19937_64 rng(mix_seed(seed, name_hash(kind)));
  if (kind == "line3-canonical") {
    auto space = DiscreteSpace::from_coordinates({{0.0}, {1.0}, {3.0}}, {1.0, 1.0, 1.0});
    auto lambda = DominatingFunction::floored_power(4.0, 1.0, 0.25, 3);
    return Scenario{kind, 3, seed, std::move(space), std::move(lambda), "antisymmetric-lambda", 1.0,
                    nlohmann::json::object()};
  }
  if (kind == "grid") {
    std::vector<std::vector<double>> pts(size);
    for (std::size_t i = 0; i < size; ++i) pts[i] = {static_cast<double>(i)};
    auto space = DiscreteSpace::from_coordinates(std::move(pts), std::vector<double>(size, 1.0));
    auto lambda = DominatingFunction::floored_power(3.0, 1.0, 1.0, size);
    return Scenario{kind, size, seed, std::move(space), std::move(lambda), "antisymmetric-lambda", 1.0,
                    nlohmann::json::object()};
  }
  if (kind == "cluster-spike") {
    // Chains of geometrically shrinking distance and mass around a few centers,
    // plus a light uniform background.
    const std::size_t clusters = std::max<std::size_t>(1, size / 48);
    const std::size_t chain = std::min<std::size_t>(12, size / clusters);
    std::vector<std::vector<double>> pts;
    std::vector<double> masses;
    for (std::size_t k = 0; k < clusters; ++k) {
      const double cx = uniform(rng, 1.0, 9.0), cy = uniform(rng, 1.0, 9.0);
      for (std::size_t j = 0; j < chain; ++j) {
        const double t = uniform(rng, 0.0, 2.0 * M_PI);
        const double r = std::ldexp(1.0, -static_cast<int>(j));
        pts.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
        masses.push_back(r);
      }
    }
    while (pts.size() < size) {
      pts.push_back({uniform(rng, 0.0, 10.0), uniform(rng, 0.0, 10.0)});
      masses.push_back(1e-3);
    }
    auto space = DiscreteSpace::from_coordinates(std::move(pts), std::move(masses));
    const double c = fit_linear_scale(space);
    auto lambda = floored_linear(space, c);
    nlohmann::json info = {{"scale", c}, {"clusters", clusters}, {"chain", chain}};
    info["non_doubling"] = non_doubling_witness(space);
    return Scenario{kind, size, seed, std::move(space), std::move(lambda), "antisymmetric-lambda", 1.0, info};
  }
  if (kind == "power-floor-line") {
    std::vector<std::vector<double>> pts(size);
    std::vector<double> masses(size);
    const double n = static_cast<double>(size);
    for (std::size_t k = 0; k < size; ++k) {
      const double x = static_cast<double>(k) / n;
      pts[k] = {x * x};
      masses[k] = (2.0 * static_cast<double>(k) + 1.0) / (n * n);
    }
    auto space = DiscreteSpace::from_coordinates(std::move(pts), std::move(masses));
    const double c = fit_linear_scale(space);
    auto lambda = floored_linear(space, c);
    nlohmann::json info = {{"scale", c}};
    info["non_doubling"] = non_doubling_witness(space);
    return Scenario{kind, size, seed, std::move(space), std::move(lambda), "antisymmetric-lambda", 1.0, info};
  }
  if (kind == "bergman-sample") {
    BergmanConfig cfg;
    cfg.n = 1;
    cfg.m = 1.0;
    cfg.seed = seed;
    for (std::size_t i = 0; i < size; ++i) {
      const double r = uniform(rng, 0.1, 0.95);
      const double t = uniform(rng, 0.0, 2.0 * M_PI);
      cfg.points.push_back({r * std::cos(t), r * std::sin(t)});
    }
    auto inst = bergman_kernel(cfg);
    nlohmann::json info = {{"mass", inst.mass}, {"quasi_constant", inst.space.quasi_constant()}};
    info["non_doubling"] = non_doubling_witness(inst.space);
    return Scenario{kind, size, seed, std::move(inst.space), std::move(inst.lambda), "bergman", cfg.m, info};
  }
  throw ArgumentError("unknown scenario kind '" + kind + "'");
}

nlohmann::json to_json(const Scenario& s) {
  return {{"kind", s.kind},         {"size", s.size},     {"seed", s.seed},
          {"kernel", s.kernel_name}, {"kernel_m", s.kernel_m}, {"info", s.info},
          {"space", to_json(s.space)}, {"lambda", to_json(s.lambda)}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", std::string("custom"));
  const auto size = j.value("size", std::size_t{0});
  const auto seed = j.value("seed", std::uint64_t{7});
  if (!j.contains("space")) return generate(kind, size, seed);
  auto space = space_from_json(j.at("space"));
  auto lambda = lambda_from_json(j.at("lambda"), space.size());
  const std::size_t n = space.size();
  return Scenario{kind,
                  n,
                  seed,
                  std::move(space),
                  std::move(lambda),
                  j.value("kernel", std::string("antisymmetric-lambda")),
                  j.value("kernel_m", 1.0),
                  j.value("info", nlohmann::json::object())};
}

Kernel scenario_kernel(const Scenario& s) {
  return make_kernel(s.kernel_name, s.space, s.lambda, {{"m", s.kernel_m}});
}

FunctionOnSpace scenario_function(const Scenario& s, const std::string& family, std::uint64_t seed) {
  const std::size_t n = s.space.size();
  std::mt19937_64 rng(mix_seed(mix_seed(s.seed, seed), name_hash(family)));
  FunctionOnSpace f(n, 0.0);
  if (family == "random-sign" || family == "mean-zero") {
    for (auto& v : f) v = (rng() >> 63) ? 1.0 : -1.0;
    if (family == "mean-zero") {
      double integral = 0.0;
      for (std::size_t x = 0; x < n; ++x) integral += f[x] * s.space.mass(x);
      const double mean = integral / s.space.total_mass();
      for (auto& v : f) v -= mean;
    }
  } else if (family == "gaussian") {
    std::normal_distribution<double> g;
    for (auto& v : f) v = g(rng);
  } else if (family == "spike") {
    f[pick(rng, n)] = 10.0;
  } else if (family == "indicator") {
    const PointIndex c = pick(rng, n);
    auto d = std::vector<double>(s.space.distance_row(c).begin(), s.space.distance_row(c).end());
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n / 2), d.end());
    const double r = d[n / 2];
    for (std::size_t x = 0; x < n; ++x) f[x] = s.space.distance(c, x) <= r ? 1.0 : 0.0;
  } else if (family == "smooth") {
    const PointIndex c = pick(rng, n);
    const double diam = std::max(s.space.diameter(), 1e-300);
    for (std::size_t x = 0; x < n; ++x) f[x] = std::cos(M_PI * s.space.distance(c, x) / diam);
  } else {
    throw ArgumentError("unknown function family '" + family + "'");
  }
  return f;
}

AtomicBlock random_atomic_block(const BallIndex& index, std::mt19937_64& rng) {
  const DiscreteSpace& space = index.space();
  const std::size_t n = index.point_count();
  const PointIndex c = pick(rng, n);
  const std::size_t ranks = index.rank_count(c);
  const std::size_t k = ranks > 1 ? 1 + pick(rng, ranks - 1) : 0;
  AtomicBlock block;
  block.host = to_ball(index, index.id(c, k));
  block.infinity = true;
  block.rho = 6.0;
  const auto members = index.members(index.id(c, k));
  auto sub_ball = [&](PointIndex y) {
    // Random candidate ball at y whose member set stays inside the host.
    std::size_t top = 0;
    for (std::size_t r = 0; r < index.rank_count(y); ++r) {
      if (!ball_subset(space, to_ball(index, index.id(y, r)), block.host)) break;
      top = r;
    }
    return to_ball(index, index.id(y, pick(rng, top + 1)));
  };
  std::vector<PointIndex> heavy;
  for (const PointIndex y : members)
    if (space.mass(y) > 0.0) heavy.push_back(y);
  if (heavy.empty()) return block;
  const PointIndex y1 = heavy[pick(rng, heavy.size())];
  PointIndex y2 = heavy[pick(rng, heavy.size())];
  if (heavy.size() > 1)
    while (y2 == y1) y2 = heavy[pick(rng, heavy.size())];
  const Ball b1 = sub_ball(y1), b2 = sub_ball(y2);
  double sign = 1.0;
  for (const Ball& b : {b1, b2}) {
    const double k_coef = coefficient_K(space, index.lambda(), b, block.host).value;
    const double mu_rho = ball_measure(space, b.dilate(block.rho));
    const double height = 1.0 / (mu_rho * k_coef);
    AtomTerm t;
    t.ball = b;
    t.atom.assign(n, 0.0);
    for (PointIndex y = 0; y < n; ++y)
      if (space.distance(b.center, y) <= b.radius) t.atom[y] = sign * height;
    // Unit integral per term so the block has mean zero.
    t.coefficient = 1.0 / (height * ball_measure(space, b));
    block.terms.push_back(std::move(t));
    sign = -1.0;
  }
  return block;
}

SuiteConfig SuiteConfig::from_json(const nlohmann::json& j) {
  SuiteConfig c;
  c.seed = j.value("seed", std::uint64_t{7});
  for (const auto& s : j.value("scenarios", nlohmann::json::array())) {
    ScenarioSpec spec;
    spec.kind = s.at("kind").get<std::string>();
    spec.seed = s.value("seed", c.seed);
    if (s.contains("sizes")) {
      for (const auto& z : s.at("sizes")) {
        spec.size = z.get<std::size_t>();
        c.scenarios.push_back(spec);
      }
      continue;
    }
    spec.size = s.value("size", static_cast<std::size_t>(spec.kind == "line3-canonical" ? 3 : 64));
    c.scenarios.push_back(spec);
  }
  c.checks = j.value("checks", std::vector<std::string>{});
  c.pairs.pair_cap = j.value("pair_cap", c.pairs.pair_cap);
  c.pairs.seed = j.value("pair_seed", c.pairs.seed);
  c.inject_fault = j.value("inject_fault", false);
  c.drift = j.value("drift", true);
  c.drift_factor = j.value("drift_factor", 2.0);
  return c;
}

nlohmann::json SuiteConfig::to_json() const {
  auto sc = nlohmann::json::array();
  for (const auto& s : scenarios) sc.push_back({{"kind", s.kind}, {"size", s.size}, {"seed", s.seed}});
  return {{"scenarios", sc},       {"checks", checks},           {"pair_cap", pairs.pair_cap},
          {"pair_seed", pairs.seed}, {"seed", seed},             {"inject_fault", inject_fault},
          {"drift", drift},         {"drift_factor", drift_factor}};
}

nlohmann::json SuiteRecord::to_json(bool with_timing) const {
  auto j = report.to_json();
  j["scenario"] = scenario;
  j["kind"] = kind;
  j["size"] = size;
  j["seed"] = seed;
  if (with_timing) j["wall_ms"] = wall_ms;
  return j;
}

nlohmann::json DriftRecord::to_json() const {
  return {{"check", "drift"},  {"of", check},   {"kind", kind},   {"seed", seed},
          {"value", value},    {"size_small", size_small},      {"size_large", size_large},
          {"small", finite_or_tag(small)}, {"large", finite_or_tag(large)},
          {"factor", finite_or_tag(factor)}, {"flagged", flagged}};
}

bool SuiteResult::passed() const { return failed_count() == 0; }

std::size_t SuiteResult::failed_count() const {
  std::size_t k = 0;
  for (const auto& r : records) k += !r.report.passed();
  return k;
}

std::string SuiteResult::to_jsonl(bool with_timing) const {
  std::ostringstream os;
  for (const auto& r : records) os << r.to_json(with_timing).dump() << '\n';
  for (const auto& d : drift) os << d.to_json().dump() << '\n';
  return os.str();
}

std::string SuiteResult::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "scenario,kind,size,seed,check,passed,vacuous,exact,key,value\n";
  for (const auto& r : records)
    for (const auto& [k, v] : r.report.values)
      os << r.scenario << ',' << r.kind << ',' << r.size << ',' << r.seed << ',' << r.report.check << ','
         << r.report.passed() << ',' << r.report.vacuous << ',' << r.report.exact << ',' << k << ',' << v << '\n';
  return os.str();
}

std::vector<std::string> check_names() {
  return {"upper_doubling", "geometric_doubling",     "non_doubling",     "covering",
          "maximal_weak11", "sharp_dominations",      "maximal_monotone", "three_doubling",
          "k_chain",        "k_compatibility",        "cz",               "john_nirenberg",
          "rbmo_characterizations",                   "good_lambda",      "sharp_norm_ratio",
          "kernel_size",    "kernel_holder",          "operator_weak11",  "cotlar",
          "rbmo_image",     "hardy_l1",               "duality",          "commutator"};
}

namespace {

using Runner = CheckReport (*)(const Scenario&, const BallIndex&, const SuiteConfig&);

std::mt19937_64 check_rng(const Scenario& s, const SuiteConfig& c, const char* name) {
  return std::mt19937_64(mix_seed(mix_seed(s.seed, c.seed), name_hash(name)));
}

CheckReport check_upper_doubling(const Scenario& s, const BallIndex&, const SuiteConfig&) {
  CheckReport rep;
  rep.check = "upper_doubling";
  const auto u = validate_upper_doubling(s.space, s.lambda);
  rep.assert_that("positive", u.positive);
  rep.assert_that("monotone", u.monotone);
  rep.assert_that("doubling", u.doubling);
  rep.assert_that("dominated", u.dominated, "worst ratio " + std::to_string(u.worst_ratio));
  rep.set("worst_ratio", u.worst_ratio);
  rep.set("comparability", u.comparability);
  rep.set("c_lambda", s.lambda.doubling_constant());
  rep.witness = {{"center", u.witness_center}, {"radius", u.witness_radius}};
  return rep;
}

CheckReport check_geometric_doubling(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "geometric_doubling";
  const auto g = validate_geometric_doubling(s.space);
  rep.set("covering_number", static_cast<double>(g.covering_number));
  rep.set("dimension", g.dimension);
  rep.witness = {{"center", g.witness_center}, {"radius", g.witness_radius}};
  // Randomized packing search: disjoint balls of radius alpha r centered in B(x, r).
  auto rng = check_rng(s, c, "packing");
  const double alphas[] = {1.0, 0.5, 0.25, 0.125};
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PointIndex x = pick(rng, s.space.size());
    const BallId b = index.id(x, pick(rng, index.rank_count(x)));
    const double r = index.radius(b);
    const double alpha = alphas[pick(rng, 4)];
    std::vector<PointIndex> members(index.members(b).begin(), index.members(b).end());
    std::shuffle(members.begin(), members.end(), rng);
    std::vector<PointIndex> centers;
    for (const PointIndex y : members) {
      bool ok = true;
      for (const PointIndex z : centers) ok = ok && !balls_intersect(s.space, {y, alpha * r}, {z, alpha * r});
      if (ok) centers.push_back(y);
    }
    const double levels = std::ceil(std::log2(1.0 / alpha));
    const double proven = std::pow(static_cast<double>(g.covering_number), levels);
    rep.assert_that("packing_bound", static_cast<double>(centers.size()) <= proven,
                    std::to_string(centers.size()) + " disjoint balls");
    const double heuristic = static_cast<double>(g.covering_number) * std::pow(alpha, -g.dimension);
    worst_ratio = std::max(worst_ratio, static_cast<double>(centers.size()) / heuristic);
  }
  rep.set("packing_over_n_alpha", worst_ratio);
  return rep;
}

CheckReport check_non_doubling(const Scenario& s, const BallIndex&, const SuiteConfig&) {
  CheckReport rep;
  rep.check = "non_doubling";
  const auto w = s.info.contains("non_doubling") ? s.info.at("non_doubling") : non_doubling_witness(s.space);
  rep.set("max_doubling_ratio", w.at("max_doubling_ratio").get<double>());
  rep.witness = w;
  return rep;
}

CheckReport check_covering(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "covering";
  auto rng = check_rng(s, c, "covering");
  std::size_t max_overlap = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + pick(rng, std::min<std::size_t>(s.space.size(), 24));
    std::vector<Ball> family;
    for (std::size_t i = 0; i < m; ++i) {
      const PointIndex x = pick(rng, s.space.size());
      family.push_back(to_ball(index, index.id(x, pick(rng, index.rank_count(x)))));
    }
    const auto v = vitali_cover(s.space, family);
    const auto cv = check_cover(s.space, family, v);
    rep.assert_that("vitali_disjoint", cv.disjoint, cv.detail);
    rep.assert_that("vitali_covering", cv.covering, cv.detail);
    rep.assert_that("vitali_greedy", cv.greedy_structure, cv.detail);
    const auto f = finite_overlap_cover(s.space, family);
    const auto cf = check_cover(s.space, family, f);
    rep.assert_that("finite_overlap_disjoint", cf.disjoint, cf.detail);
    rep.assert_that("finite_overlap_covering", cf.covering, cf.detail);
    rep.assert_that("finite_overlap_greedy", cf.greedy_structure, cf.detail);
    max_overlap = std::max(max_overlap, f.max_overlap());
  }
  rep.set("families", 200.0);
  rep.set("max_overlap", static_cast<double>(max_overlap));
  return rep;
}

CheckReport check_maximal_weak11(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "maximal_weak11";
  const double rho = vitali_dilation(s.space);
  double worst = 0.0;
  for (const char* fam : {"random-sign", "spike", "gaussian", "indicator"}) {
    const auto f = scenario_function(s, fam, c.seed);
    const auto m = maximal_noncentered(index, f, rho);
    const auto sub = maximal_weak11_check(index, f, level_grid(m.values));
    for (const auto& [k, ok] : sub.assertions) rep.assert_that(k, ok, std::string(fam));
    worst = std::max(worst, sub.values.at("constant"));
  }
  rep.set("rho", rho);
  rep.set("max_ratio", worst);
  return rep;
}

CheckReport check_sharp_dominations(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "sharp_dominations";
  const auto params = DoublingParams::standard(s.lambda);
  double worst_a = 0.0, worst_b = 0.0;
  for (const char* fam : {"random-sign", "gaussian", "spike", "smooth"}) {
    const auto f = scenario_function(s, fam, c.seed);
    FunctionOnSpace af(f.size());
    double sup = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      af[x] = std::abs(f[x]);
      sup = std::max(sup, af[x]);
    }
    const auto ms = sharp_maximal(index, f, params, c.pairs);
    const auto ms_abs = sharp_maximal(index, af, params, c.pairs);
    const auto m6 = maximal_noncentered(index, f, 6.0);
    const auto nf = maximal_doubling(index, f, params);
    rep.exact = rep.exact && ms.exact && ms_abs.exact;
    for (std::size_t x = 0; x < f.size(); ++x) {
      const double rhs_a = m6.values[x] + 3.0 * nf.values[x];
      const double rhs_b = 5.0 * params.beta0 * ms.values[x];
      const std::string tag = std::string(fam) + " at " + std::to_string(x);
      rep.assert_that("sharp_le_m6_plus_3n", ms.values[x] <= rhs_a * (1.0 + kTol) + 1e-12 * sup, tag);
      rep.assert_that("sharp_abs_le_5beta0_sharp", ms_abs.values[x] <= rhs_b * (1.0 + kTol) + 1e-12 * sup, tag);
      if (rhs_a > 0.0) worst_a = std::max(worst_a, ms.values[x] / rhs_a);
      if (rhs_b > 0.0) worst_b = std::max(worst_b, ms_abs.values[x] / rhs_b);
    }
  }
  rep.set("max_ratio_m6_3n", worst_a);
  rep.set("max_ratio_5beta0", worst_b);
  rep.set("beta0", params.beta0);
  return rep;
}

CheckReport check_maximal_monotone(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "maximal_monotone";
  const auto f = scenario_function(s, "gaussian", c.seed);
  const double rhos[] = {1.0, 2.0, 5.0, 6.0};
  std::vector<FunctionOnSpace> vals;
  for (const double r : rhos) vals.push_back(maximal_noncentered(index, f, r).values);
  for (std::size_t i = 1; i < vals.size(); ++i)
    for (std::size_t x = 0; x < f.size(); ++x)
      rep.assert_that("monotone_in_rho", vals[i][x] <= vals[i - 1][x], "point " + std::to_string(x));
  const auto m1 = maximal_noncentered(index, f, 1.0);
  for (std::size_t x = 0; x < f.size(); ++x)
    if (s.space.mass(x) > 0.0)
      rep.assert_that("dominates_at_atoms", m1.values[x] >= std::abs(f[x]) * (1.0 - kTol), std::to_string(x));
  return rep;
}

CheckReport check_three_doubling(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "three_doubling";
  auto rng = check_rng(s, c, "three_doubling");
  std::size_t premises = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PointIndex x = pick(rng, s.space.size());
    const Ball b = to_ball(index, index.id(x, pick(rng, index.rank_count(x))));
    const double alpha = uniform(rng, 1.1, 6.0);
    const double beta = std::exp(uniform(rng, std::log(1.1), std::log(500.0)));
    DoublingParams cube{alpha * alpha * alpha, beta, beta};
    DoublingParams one{alpha, beta, beta};
    if (!is_doubling(s.space, s.lambda, b, cube)) continue;
    ++premises;
    const std::string tag = "trial " + std::to_string(trial);
    rep.assert_that("b_doubling", is_doubling(s.space, s.lambda, b, one), tag);
    rep.assert_that("alpha_b_doubling", is_doubling(s.space, s.lambda, b.dilate(alpha), one), tag);
    rep.assert_that("alpha2_b_doubling", is_doubling(s.space, s.lambda, b.dilate(alpha * alpha), one), tag);
  }
  rep.set("trials", 1000.0);
  rep.set("premises", static_cast<double>(premises));
  return rep;
}

CheckReport check_k_chain(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "k_chain";
  auto rng = check_rng(s, c, "k_chain");
  const double lo = std::log(index.epsilon_min());
  const double hi = std::log(2.0 * std::max(s.space.diameter(), index.epsilon_min()));
  double runs = 0.0, shared = 0.0, worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PointIndex x = pick(rng, s.space.size());
    const std::size_t m = 2 + pick(rng, 7);
    std::vector<double> radii(m);
    for (auto& r : radii) r = std::exp(uniform(rng, lo, hi));
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    if (radii.size() < 2) continue;
    const auto sub = chain_inequality_check(index, x, radii);
    for (const auto& [k, ok] : sub.assertions) rep.assert_that(k, ok, "trial " + std::to_string(trial));
    runs += sub.values.at("runs");
    shared += sub.values.at("runs_with_shared_spheres");
    worst = std::max(worst, sub.values.at("max_ratio"));
  }
  rep.vacuous = runs == 0.0;
  rep.set("qualifying_runs", runs);
  rep.set("runs_with_shared_spheres", shared);
  rep.set("max_ratio", worst);
  return rep;
}

CheckReport check_k_compatibility(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "k_compatibility";
  auto rng = check_rng(s, c, "k_compatibility");
  double max_kprime_ratio = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const PointIndex x = pick(rng, s.space.size());
    const auto radii = index.radii(x);
    std::size_t i = pick(rng, radii.size()), j = pick(rng, radii.size()), k = pick(rng, radii.size());
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
    const Ball q{x, radii[i]}, r{x, radii[j]}, big{x, radii[k]};
    const double kqr = coefficient_K(s.space, s.lambda, q, r).value;
    const double kqs = coefficient_K(s.space, s.lambda, q, big).value;
    rep.assert_that("k_nested_monotone", kqr <= kqs, "trial " + std::to_string(trial));
    rep.assert_that("k_at_least_one", kqr >= 1.0 && kqs >= 1.0);
    const auto kp = coefficient_Kprime(s.space, s.lambda, q, big);
    rep.assert_that("kprime_at_least_one", kp.value >= 1.0);
    if (kp.k_over_kprime) max_kprime_ratio = std::max(max_kprime_ratio, *kp.k_over_kprime);
  }
  const auto params = DoublingParams::standard(s.lambda);
  const auto run = non_doubling_run_constant(index, 6.0, params.beta0);
  rep.set("non_doubling_run_k", run.max_k);
  rep.set("compatible_size_k_6", compatible_size_constant(index, 6.0));
  if (s.lambda.is_homogeneous()) rep.set("max_k_over_kprime", max_kprime_ratio);
  rep.witness = {{"center", run.witness.center}, {"radius", run.witness.radius}, {"run", run.witness_run}};
  return rep;
}

CheckReport check_cz(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "cz";
  auto rng = check_rng(s, c, "cz");
  const auto params = DoublingParams::standard(s.lambda);
  const std::size_t n = s.space.size();
  std::size_t nontrivial = 0;
  double max_kappa = 0.0, max_c6 = 0.0, max_cz8 = 0.0;
  std::optional<std::pair<FunctionOnSpace, CZDecomposition>> fault_source;
  for (int inst = 0; inst < 20; ++inst) {
    const double p = inst % 2 == 0 ? 1.0 : 2.0;
    const std::size_t spikes = 1 + pick(rng, 3);
    FunctionOnSpace f(n);
    for (auto& v : f) v = uniform(rng, -0.1, 0.1);
    // Spikes on light atoms keep the proviso satisfiable below the spike height.
    std::vector<PointIndex> light;
    for (PointIndex x = 0; x < n; ++x)
      if (s.space.mass(x) > 0.0 && s.space.mass(x) < s.space.total_mass() / (4.0 * params.beta0 * spikes))
        light.push_back(x);
    for (std::size_t k = 0; k < spikes && !light.empty(); ++k)
      f[light[pick(rng, light.size())]] = (rng() >> 63 ? 1.0 : -1.0) * uniform(rng, 5.0, 10.0);
    double norm_pp = 0.0;
    for (PointIndex x = 0; x < n; ++x) norm_pp += std::pow(std::abs(f[x]), p) * s.space.mass(x);
    const double lmin = std::pow(params.beta0 * norm_pp / s.space.total_mass(), 1.0 / p);
    const double lambda = std::max(lmin, 1e-300) * uniform(rng, 1.05, 2.0);
    const auto dec = cz_decompose(index, f, lambda, p, params);
    const auto v = verify_cz(index, f, dec);
    const std::string tag = "instance " + std::to_string(inst);
    for (const auto& [k, ok] : v.assertions) rep.assert_that(k, ok, tag);
    if (!v.passed()) rep.witness["failed_instance"] = inst;
    if (!dec.blocks.empty()) {
      ++nontrivial;
      max_kappa = std::max(max_kappa, dec.kappa);
      if (p == 1.0) max_c6 = std::max(max_c6, v.values.at("cz6_constant"));
      else max_cz8 = std::max(max_cz8, v.values.at("cz8_constant"));
      if (!fault_source) fault_source.emplace(f, dec);
    }
  }
  rep.set("instances", 20.0);
  rep.set("nontrivial", static_cast<double>(nontrivial));
  rep.set("max_kappa", max_kappa);
  rep.set("max_cz6_constant", max_c6);
  rep.set("max_cz8_constant_p2", max_cz8);
  if (c.inject_fault && fault_source) {
    auto bad = fault_source->second;
    bad.blocks[0].alpha *= 2.0;
    const auto v = verify_cz(index, fault_source->first, bad);
    rep.assert_that("injected_fault_cz4", v.assertions.count("cz4") ? v.assertions.at("cz4") : true,
                    "alpha of block 0 doubled");
    rep.witness["injected"] = v.witness;
  }
  return rep;
}

CheckReport check_john_nirenberg(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "john_nirenberg";
  const auto params = DoublingParams::standard(s.lambda);
  const auto f = scenario_function(s, "random-sign", c.seed);
  const auto j1 = john_nirenberg_check(index, f, 1.0, 6.0, params, c.pairs);
  const auto j2 = john_nirenberg_check(index, f, 2.0, 6.0, params, c.pairs);
  for (const auto& [k, ok] : j1.assertions) rep.assert_that(k, ok);
  rep.vacuous = j1.vacuous || j2.vacuous;
  rep.exact = j1.exact && j2.exact;
  rep.set("ratio_p1", j1.values.at("constant"));
  rep.set("constant", j2.values.at("constant"));
  rep.set("rbmo", j1.values.at("rbmo"));
  return rep;
}

CheckReport check_rbmo_characterizations(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "rbmo_characterizations";
  const auto params = DoublingParams::standard(s.lambda);
  const auto f = scenario_function(s, "random-sign", c.seed);
  const auto est = rbmo_estimate(index, f, params, c.pairs);
  rep.exact = est.exact;
  rep.set("c_b", est.c_b);
  rep.set("c_c", est.c_c);
  rep.set("c_canonical", est.c_canonical);
  rep.vacuous = !(est.c_c > 0.0 && est.c_b > 0.0);
  if (!rep.vacuous) {
    rep.set("constant_b_over_c", est.c_b / est.c_c);
    rep.set("constant_canonical_over_b", est.c_canonical / est.c_b);
  }
  rep.witness = est.to_json();
  return rep;
}

CheckReport check_good_lambda(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  const auto params = DoublingParams::standard(s.lambda);
  const auto f = scenario_function(s, "mean-zero", c.seed);
  GoodLambdaParams gl;
  gl.lambdas = level_grid(maximal_doubling(index, f, params).values);
  return good_lambda_check(index, f, gl, params, c.pairs);
}

CheckReport check_sharp_norm_ratio(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "sharp_norm_ratio";
  const auto params = DoublingParams::standard(s.lambda);
  const auto f = scenario_function(s, "mean-zero", c.seed);
  const auto nf = maximal_doubling(index, f, params);
  const auto ms = sharp_maximal(index, f, params, c.pairs);
  rep.exact = ms.exact;
  for (const double p : {1.5, 2.0, 4.0}) {
    const double den = lp_norm(s.space, ms.values, p);
    std::ostringstream key;
    key << "constant_p" << p;
    if (den > 0.0) rep.set(key.str(), lp_norm(s.space, nf.values, p) / den);
    else rep.vacuous = true;
  }
  return rep;
}

CheckReport check_kernel_size(const Scenario& s, const BallIndex&, const SuiteConfig&) {
  CheckReport rep;
  rep.check = "kernel_size";
  const auto kernel = scenario_kernel(s);
  const auto fit = validate_kernel_size(s.space, kernel, s.lambda);
  rep.set("c_fit", fit.c_fit);
  rep.set("pairs", static_cast<double>(fit.pairs));
  rep.assert_that("finite", std::isfinite(fit.c_fit));
  if (fit.c_fit > 0.0) {
    // Recompute the witness pair directly against the shrunken constant.
    const double d = s.space.distance(fit.worst_x, fit.worst_y);
    const double bound = fit.c_fit * (1.0 - kTol) /
                         std::max(s.lambda(fit.worst_x, d), s.lambda(fit.worst_y, d));
    rep.assert_that("minimal", std::abs(kernel(fit.worst_x, fit.worst_y)) > bound);
  }
  rep.witness = {{"x", fit.worst_x}, {"y", fit.worst_y}};
  return rep;
}

CheckReport check_kernel_holder(const Scenario& s, const BallIndex&, const SuiteConfig&) {
  CheckReport rep;
  rep.check = "kernel_holder";
  const auto kernel = scenario_kernel(s);
  const auto fit = validate_kernel_holder(s.space, kernel, s.lambda, 0.5);
  rep.vacuous = fit.empty;
  rep.set("c_fit", fit.c_fit);
  rep.set("delta", fit.delta);
  rep.set("delta_fit", fit.delta_fit);
  rep.set("triples", static_cast<double>(fit.triples));
  rep.assert_that("finite", std::isfinite(fit.c_fit));
  if (fit.c_fit > 0.0) {
    const PointIndex x = fit.worst_x, xp = fit.worst_xp, y = fit.worst_y;
    const double dxy = s.space.distance(x, y), dxx = s.space.distance(x, xp);
    const double lhs = std::abs(kernel(x, y) - kernel(xp, y)) + std::abs(kernel(y, x) - kernel(y, xp));
    const double rhs = fit.c_fit * (1.0 - kTol) * std::pow(dxx / dxy, fit.delta) / s.lambda(x, dxy);
    rep.assert_that("minimal", lhs > rhs);
  }
  rep.witness = {{"x", fit.worst_x}, {"x_prime", fit.worst_xp}, {"y", fit.worst_y}};
  return rep;
}

CheckReport check_operator_weak11(const Scenario& s, const BallIndex&, const SuiteConfig& c) {
  const auto kernel = scenario_kernel(s);
  const auto f = scenario_function(s, "random-sign", c.seed);
  return weak11_check(s.space, kernel, f, {});
}

CheckReport check_cotlar(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  const auto kernel = scenario_kernel(s);
  const auto f = scenario_function(s, "random-sign", c.seed);
  return cotlar_check(index, kernel, f, 0.5);
}

CheckReport check_rbmo_image(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  // Families with a continuum limit; random signs average out as N grows.
  const auto kernel = scenario_kernel(s);
  CheckReport rep;
  rep.check = "rbmo_image";
  double worst = 0.0;
  for (const char* fam : {"indicator", "smooth"}) {
    const auto f = scenario_function(s, fam, c.seed);
    const auto sub = rbmo_image_check(index, kernel, f, DoublingParams::standard(s.lambda), c.pairs);
    for (const auto& [name, ok] : sub.assertions) rep.assert_that(name, ok, fam);
    rep.exact = rep.exact && sub.exact;
    rep.vacuous = rep.vacuous || sub.vacuous;
    if (sub.vacuous) continue;
    rep.set(std::string("ratio_") + fam, sub.values.at("constant"));
    worst = std::max(worst, sub.values.at("constant"));
  }
  rep.set("constant", worst);
  return rep;
}

CheckReport check_hardy_l1(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "hardy_l1";
  const auto kernel = scenario_kernel(s);
  auto rng = check_rng(s, c, "blocks");
  double worst = 0.0;
  std::size_t used = 0;
  for (int k = 0; k < 16; ++k) {
    const auto block = random_atomic_block(index, rng);
    const auto sub = hardy_l1_check(s.space, s.lambda, kernel, block);
    for (const auto& [name, ok] : sub.assertions) rep.assert_that(name, ok, "block " + std::to_string(k));
    if (sub.vacuous) continue;
    ++used;
    worst = std::max(worst, sub.values.at("constant"));
  }
  rep.vacuous = used == 0;
  rep.set("blocks", static_cast<double>(used));
  rep.set("constant", worst);
  return rep;
}

CheckReport check_duality(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  CheckReport rep;
  rep.check = "duality";
  auto rng = check_rng(s, c, "blocks");
  const auto params = DoublingParams::standard(s.lambda);
  const auto g = scenario_function(s, "random-sign", c.seed);
  const auto est = rbmo_estimate(index, g, params, c.pairs);
  rep.exact = est.exact;
  const FunctionOnSpace ones(s.space.size(), 1.0);
  const auto est_one = rbmo_estimate(index, ones, params, c.pairs);
  double worst = 0.0;
  std::size_t used = 0;
  for (int k = 0; k < 16; ++k) {
    const auto block = random_atomic_block(index, rng);
    const auto v = atomic_block_validate(s.space, s.lambda, block);
    rep.assert_that("block_valid", v.valid, v.failures.empty() ? "" : v.failures.front());
    const auto sub = duality_pairing_check(s.space, block, g, est);
    const auto flat = duality_pairing_check(s.space, block, ones, est_one);
    for (const auto& [name, ok] : flat.assertions) rep.assert_that(name, ok, "block " + std::to_string(k));
    if (sub.vacuous) continue;
    ++used;
    worst = std::max(worst, sub.values.at("constant"));
  }
  rep.vacuous = used == 0;
  rep.set("blocks", static_cast<double>(used));
  rep.set("rbmo_g", est.norm());
  rep.set("constant", worst);
  return rep;
}

CheckReport check_commutator(const Scenario& s, const BallIndex& index, const SuiteConfig& c) {
  const auto kernel = scenario_kernel(s);
  const auto b = scenario_function(s, "random-sign", mix_seed(c.seed, 1));
  const auto f = scenario_function(s, "random-sign", mix_seed(c.seed, 2));
  return commutator_pointwise_check(index, kernel, b, f, 2.0, DoublingParams::standard(s.lambda), c.pairs);
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"upper_doubling", check_upper_doubling},
      {"geometric_doubling", check_geometric_doubling},
      {"non_doubling", check_non_doubling},
      {"covering", check_covering},
      {"maximal_weak11", check_maximal_weak11},
      {"sharp_dominations", check_sharp_dominations},
      {"maximal_monotone", check_maximal_monotone},
      {"three_doubling", check_three_doubling},
      {"k_chain", check_k_chain},
      {"k_compatibility", check_k_compatibility},
      {"cz", check_cz},
      {"john_nirenberg", check_john_nirenberg},
      {"rbmo_characterizations", check_rbmo_characterizations},
      {"good_lambda", check_good_lambda},
      {"sharp_norm_ratio", check_sharp_norm_ratio},
      {"kernel_size", check_kernel_size},
      {"kernel_holder", check_kernel_holder},
      {"operator_weak11", check_operator_weak11},
      {"cotlar", check_cotlar},
      {"rbmo_image", check_rbmo_image},
      {"hardy_l1", check_hardy_l1},
      {"duality", check_duality},
      {"commutator", check_commutator},
  };
  return table;
}

CheckReport run_with_index(const std::string& name, const Scenario& scenario, const BallIndex& index,
                           const SuiteConfig& config) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw ArgumentError("unknown check '" + name + "'");
  auto rep = it->second(scenario, index, config);
  rep.check = name;
  return rep;
}

}  // namespace

CheckReport run_check(const std::string& name, const Scenario& scenario, const SuiteConfig& config) {
  const BallIndex index(scenario.space, scenario.lambda);
  return run_with_index(name, scenario, index, config);
}

SuiteResult run_suite(const SuiteConfig& config) {
  std::vector<std::string> checks;
  for (const auto& c : config.checks) {
    if (c == "all") {
      for (const auto& n : check_names()) checks.push_back(n);
    } else {
      if (!runners().count(c)) throw ArgumentError("unknown check '" + c + "'");
      checks.push_back(c);
    }
  }
  SuiteResult result;
  if (checks.empty()) return result;
  for (const auto& spec : config.scenarios) {
    const auto scenario = generate(spec.kind, spec.size, spec.seed);
    const BallIndex index(scenario.space, scenario.lambda);
    for (const auto& name : checks) {
      const auto t0 = std::chrono::steady_clock::now();
      SuiteRecord rec;
      rec.report = run_with_index(name, scenario, index, config);
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rec.scenario = scenario.id();
      rec.kind = scenario.kind;
      rec.size = scenario.size;
      rec.seed = scenario.seed;
      result.records.push_back(std::move(rec));
    }
  }
  if (config.drift) result.drift = compare_sizes(result.records, config.drift_factor);
  return result;
}

std::vector<DriftRecord> compare_sizes(const std::vector<SuiteRecord>& records, double factor) {
  std::vector<DriftRecord> out;
  for (const auto& a : records) {
    if (a.report.vacuous) continue;
    for (const auto& b : records) {
      if (b.report.vacuous || b.kind != a.kind || b.seed != a.seed || b.report.check != a.report.check ||
          b.size != 2 * a.size)
        continue;
      for (const auto& [key, small] : a.report.values) {
        if (key.rfind("constant", 0) != 0) continue;
        const auto it = b.report.values.find(key);
        if (it == b.report.values.end()) continue;
        DriftRecord d;
        d.check = a.report.check;
        d.kind = a.kind;
        d.seed = a.seed;
        d.value = key;
        d.size_small = a.size;
        d.size_large = b.size;
        d.small = small;
        d.large = it->second;
        if (small == 0.0 && d.large == 0.0) d.factor = 1.0;
        else if (small == 0.0 || d.large == 0.0) d.factor = std::numeric_limits<double>::infinity();
        else d.factor = std::max(d.large / small, small / d.large);
        d.flagged = !(d.factor <= factor);
        out.push_back(d);
      }
    }
  }
  return out;
}

}  // namespace nhcz
