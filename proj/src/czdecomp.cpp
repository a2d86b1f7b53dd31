#include "nhcz/czdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nhcz/covering.hpp"
#include "nhcz/errors.hpp"
#include "nhcz/fspaces.hpp"

namespace nhcz {

namespace {

double pow_abs(double v, double p) { return p == 1.0 ? std::abs(v) : std::pow(std::abs(v), p); }

double hull_beta(const DominatingFunction& lambda) {
  return std::pow(lambda.doubling_constant(), std::log2(kHullDilation) + 1.0);
}

bool contains(const DiscreteSpace& space, const Ball& b, PointIndex y) {
  return space.distance(b.center, y) <= b.radius;
}

std::string ball_text(const Ball& b) {
  std::ostringstream os;
  os << "B(" << b.center << ", " << b.radius << ")";
  return os.str();
}

}  // namespace

FunctionOnSpace cz_omega(const DiscreteSpace& space, const CZDecomposition& dec, std::size_t i) {
  const std::size_t n = space.size();
  FunctionOnSpace w(n, 0.0);
  for (PointIndex x = 0; x < n; ++x) {
    if (!contains(space, dec.blocks[i].q.dilate(dec.dilation), x)) continue;
    std::size_t count = 0;
    for (const auto& blk : dec.blocks) count += contains(space, blk.q.dilate(dec.dilation), x);
    w[x] = 1.0 / static_cast<double>(count);
  }
  return w;
}

FunctionOnSpace cz_phi(const DiscreteSpace& space, const CZDecomposition& dec, std::size_t i) {
  FunctionOnSpace phi(space.size(), 0.0);
  for (const PointIndex x : dec.blocks[i].a) phi[x] = dec.blocks[i].alpha;
  return phi;
}

FunctionOnSpace cz_bad_block(const DiscreteSpace& space, std::span<const double> f, const CZDecomposition& dec,
                             std::size_t i) {
  auto b = cz_omega(space, dec, i);
  const auto phi = cz_phi(space, dec, i);
  for (std::size_t x = 0; x < b.size(); ++x) b[x] = f[x] * b[x] - phi[x];
  return b;
}

CZDecomposition cz_decompose(const BallIndex& index, std::span<const double> f, double lambda, double p,
                             const DoublingParams& params) {
  const DiscreteSpace& space = index.space();
  check_function(space, f);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("height lambda must be positive");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("exponent p must satisfy 1 <= p < infinity");
  params.check(index.lambda());
  const std::size_t n = space.size();

  std::vector<double> fp(n);
  double norm_pp = 0.0;
  for (PointIndex x = 0; x < n; ++x) {
    fp[x] = pow_abs(f[x], p);
    norm_pp += fp[x] * space.mass(x);
  }
  const double lp = std::pow(lambda, p);
  if (!(lp > params.beta0 * norm_pp / space.total_mass())) {
    std::ostringstream os;
    os << "decomposition needs lambda^p > beta0 ||f||_p^p / ||mu|| (" << lp << " vs "
       << params.beta0 * norm_pp / space.total_mass() << ")";
    throw ArgumentError(os.str());
  }

  CZDecomposition dec;
  dec.lambda = lambda;
  dec.p = p;
  dec.beta0 = params.beta0;
  dec.dilation = finite_overlap_dilation(space);

  // (a) stopping-time balls: largest concentric candidate ball above the threshold.
  const double threshold = lp / params.beta0;
  const BallIntegrals integ(index, fp);
  std::vector<BallId> stops;
  for (PointIndex x = 0; x < n; ++x) {
    if (!(space.mass(x) > 0.0) || !(std::abs(f[x]) > lambda)) continue;
    for (std::size_t k = index.rank_count(x); k-- > 0;) {
      const BallId b = index.id(x, k);
      const double denom = index.measure_within(x, kStopDilation * index.radius(b));
      if (denom > 0.0 && integ.integral(b) / denom > threshold) {
        stops.push_back(b);
        break;
      }
    }
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  std::vector<Ball> family;
  family.reserve(stops.size());
  for (const BallId b : stops) family.push_back(to_ball(index, b));
  if (family.empty()) {
    dec.g.assign(f.begin(), f.end());
    return dec;
  }
  const auto cover = finite_overlap_cover(space, family);

  // (b) doubling hulls R_i.
  const double beta_r = hull_beta(index.lambda());
  for (const std::size_t s : cover.selected) {
    CZBlock blk;
    blk.q = family[s];
    double r = kHullDilation * blk.q.radius;
    std::size_t steps = 1;
    while (index.measure_within(blk.q.center, kHullDilation * r) > beta_r * index.measure_within(blk.q.center, r)) {
      r *= kHullDilation;
      ++steps;
    }
    blk.r = {blk.q.center, r};
    blk.steps = steps;
    dec.blocks.push_back(std::move(blk));
  }
  const std::size_t m = dec.blocks.size();

  std::vector<double> cover_count(n, 0.0);
  for (const auto& blk : dec.blocks)
    for (PointIndex x = 0; x < n; ++x) cover_count[x] += contains(space, blk.q.dilate(dec.dilation), x);

  dec.order.resize(m);
  std::iota(dec.order.begin(), dec.order.end(), std::size_t{0});
  std::stable_sort(dec.order.begin(), dec.order.end(),
                   [&](std::size_t a, std::size_t b) { return dec.blocks[a].r.radius < dec.blocks[b].r.radius; });

  // phi_i greedily in R order; running |phi| sum per point.
  std::vector<double> running(n, 0.0);
  std::vector<char> done(m, 0);
  std::vector<double> phi_mass(m, 0.0);  // integral of |phi_j|
  for (const std::size_t k : dec.order) {
    CZBlock& blk = dec.blocks[k];
    double target = 0.0;
    for (PointIndex x = 0; x < n; ++x)
      if (contains(space, blk.q.dilate(dec.dilation), x)) target += f[x] / cover_count[x] * space.mass(x);

    const double mu_r = index.measure_within(blk.r.center, blk.r.radius);
    double overlap_mass = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (done[j] && balls_intersect(space, dec.blocks[j].r, blk.r)) {
        blk.overlapped = true;
        overlap_mass += phi_mass[j];
      }
    if (blk.overlapped && mu_r > 0.0) dec.c1 = std::max(dec.c1, overlap_mass / (lambda * mu_r));
    const double cut = 2.0 * dec.c1 * lambda;
    double mu_a = 0.0;
    for (PointIndex x = 0; x < n; ++x) {
      if (!contains(space, blk.r, x)) continue;
      if (blk.overlapped && running[x] > cut) continue;
      blk.a.push_back(x);
      mu_a += space.mass(x);
    }
    if (!(mu_a > 0.0)) {
      if (target == 0.0) {
        blk.a.clear();
      } else {
        throw ConstructionError("correction set has zero measure for block " + std::to_string(k) + " with R = " +
                                ball_text(blk.r));
      }
    }
    blk.alpha = mu_a > 0.0 ? target / mu_a : 0.0;
    for (const PointIndex x : blk.a) running[x] += std::abs(blk.alpha);
    phi_mass[k] = std::abs(blk.alpha) * mu_a;
    dec.c2 = std::max(dec.c2, std::abs(blk.alpha) / lambda);
    done[k] = 1;
  }
  dec.kappa = 2.0 * dec.c1 + dec.c2;

  dec.g.assign(n, 0.0);
  for (PointIndex x = 0; x < n; ++x)
    if (cover_count[x] == 0.0) dec.g[x] = f[x];
  for (const auto& blk : dec.blocks)
    for (const PointIndex x : blk.a) dec.g[x] += blk.alpha;
  return dec;
}

CZDecomposition cz_decompose(const DiscreteSpace& space, const DominatingFunction& lambda_fn,
                             std::span<const double> f, double lambda, double p, const DoublingParams& params) {
  const BallIndex index(space, lambda_fn);
  return cz_decompose(index, f, lambda, p, params);
}

CheckReport verify_cz(const BallIndex& index, std::span<const double> f, const CZDecomposition& dec) {
  const DiscreteSpace& space = index.space();
  const DominatingFunction& lam = index.lambda();
  check_function(space, f);
  const std::size_t n = space.size();
  const std::size_t m = dec.blocks.size();
  const double tol = 1e-9;
  CheckReport rep;
  rep.check = "cz_decomposition";
  rep.vacuous = m == 0;
  rep.set("lambda", dec.lambda);
  rep.set("p", dec.p);
  rep.set("blocks", static_cast<double>(m));
  rep.set("kappa", dec.kappa);

  std::vector<double> fp(n);
  double norm_pp = 0.0;
  for (PointIndex x = 0; x < n; ++x) {
    fp[x] = pow_abs(f[x], dec.p);
    norm_pp += fp[x] * space.mass(x);
  }
  const double lp = std::pow(dec.lambda, dec.p);
  const double threshold = lp / dec.beta0;
  auto power_integral = [&](const Ball& b) {
    double s = 0.0;
    for (PointIndex x = 0; x < n; ++x)
      if (contains(space, b, x)) s += fp[x] * space.mass(x);
    return s;
  };
  auto mu = [&](const Ball& b) { return index.measure_within(b.center, b.radius); };

  rep.assert_that("proviso", lp > dec.beta0 * norm_pp / space.total_mass());

  // Q_i pairwise disjoint.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      rep.assert_that("q_disjoint", !balls_intersect(space, dec.blocks[i].q, dec.blocks[j].q),
                      "blocks " + std::to_string(i) + " and " + std::to_string(j));

  double sum_q_power = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Ball& q = dec.blocks[i].q;
    const double iq = power_integral(q);
    sum_q_power += iq;
    rep.assert_that("cz1", iq > threshold * mu(q.dilate(kStopDilation)), "block " + std::to_string(i));
    // Every strictly larger concentric grid ball is at or below the threshold.
    for (const double r : index.radii(q.center)) {
      if (r <= q.radius) continue;
      const Ball big{q.center, r};
      const bool ok = power_integral(big) <= threshold * mu(big.dilate(kStopDilation)) * (1.0 + tol);
      rep.assert_that("cz2", ok, "block " + std::to_string(i) + " at radius " + std::to_string(r));
    }
  }

  std::vector<std::size_t> count(n, 0);
  for (const auto& blk : dec.blocks)
    for (PointIndex x = 0; x < n; ++x) count[x] += contains(space, blk.q.dilate(dec.dilation), x);
  for (PointIndex x = 0; x < n; ++x)
    if (count[x] == 0 && space.mass(x) > 0.0)
      rep.assert_that("cz3", std::abs(f[x]) <= dec.lambda, "point " + std::to_string(x));

  std::vector<double> omega_sum(n, 0.0), phi_sum(n, 0.0), b_sum(n, 0.0);
  double c6 = 0.0, c61 = 0.0, max_k = 1.0;
  const double beta_r = hull_beta(lam);
  for (std::size_t i = 0; i < m; ++i) {
    const CZBlock& blk = dec.blocks[i];
    const auto w = cz_omega(space, dec, i);
    const auto phi = cz_phi(space, dec, i);
    double int_fw = 0.0, int_abs_fw = 0.0, int_abs_fw_p = 0.0, int_phi = 0.0, int_b = 0.0, int_abs_b = 0.0;
    double int_abs_parts = 0.0;
    for (PointIndex x = 0; x < n; ++x) {
      omega_sum[x] += w[x];
      phi_sum[x] += std::abs(phi[x]);
      const double b = f[x] * w[x] - phi[x];
      b_sum[x] += b;
      int_fw += f[x] * w[x] * space.mass(x);
      int_abs_fw += std::abs(f[x] * w[x]) * space.mass(x);
      int_abs_fw_p += pow_abs(f[x] * w[x], dec.p) * space.mass(x);
      int_phi += phi[x] * space.mass(x);
      int_b += b * space.mass(x);
      int_abs_b += std::abs(b) * space.mass(x);
      int_abs_parts += (std::abs(f[x] * w[x]) + std::abs(phi[x])) * space.mass(x);
    }
    const std::string tag = "block " + std::to_string(i);
    // R_i: concentric, large enough, and the first doubling member of its family.
    rep.assert_that("r_concentric", blk.r.center == blk.q.center, tag);
    rep.assert_that("r_size", blk.r.radius > kStopDilation * blk.q.radius, tag);
    rep.assert_that("r_doubling", mu(blk.r.dilate(kHullDilation)) <= beta_r * mu(blk.r), tag);
    rep.assert_that("r_steps", std::abs(blk.r.radius / (blk.q.radius * std::pow(kHullDilation, blk.steps)) - 1.0) < tol,
                    tag);
    for (std::size_t k = 1; k < blk.steps; ++k) {
      const Ball earlier = blk.q.dilate(std::pow(kHullDilation, static_cast<double>(k)));
      rep.assert_that("r_first", mu(earlier.dilate(kHullDilation)) > beta_r * mu(earlier), tag);
    }
    for (const PointIndex x : blk.a) rep.assert_that("phi_support", contains(space, blk.r, x), tag);
    const double scale = std::max({int_abs_fw, std::abs(int_phi), 1e-300});
    if (std::abs(int_phi - int_fw) > tol * scale) {
      rep.witness["cz4_block"] = i;
      rep.witness["cz4_phi_integral"] = int_phi;
      rep.witness["cz4_target"] = int_fw;
    }
    rep.assert_that("cz4", std::abs(int_phi - int_fw) <= tol * scale, tag);
    // Rounding in b = f w - phi scales with the parts, not with |b|.
    if (std::abs(int_b) > tol * std::max(int_abs_b, 1e-300))
      rep.witness["mean_zero_" + std::to_string(i)] = {int_b, int_abs_b, int_abs_parts};
    rep.assert_that("block_mean_zero", std::abs(int_b) <= tol * std::max(int_abs_parts, 1e-300), tag);
    const double mu_r = mu(blk.r);
    if (int_abs_fw > 0.0) c6 = std::max(c6, std::abs(blk.alpha) * mu_r / int_abs_fw);
    if (dec.p > 1.0 && int_abs_fw_p > 0.0) {
      double phi_p = 0.0;
      for (const PointIndex x : blk.a) phi_p += pow_abs(blk.alpha, dec.p) * space.mass(x);
      const double lhs = std::pow(phi_p, 1.0 / dec.p) * std::pow(mu_r, 1.0 - 1.0 / dec.p);
      c61 = std::max(c61, lhs * std::pow(dec.lambda, dec.p - 1.0) / int_abs_fw_p);
    }
    max_k = std::max(max_k, index.k_coefficient(blk.q.center, blk.q.radius, blk.r.radius));
  }

  double max_g = 0.0;
  for (PointIndex x = 0; x < n; ++x) {
    const double expect = count[x] > 0 ? 1.0 : 0.0;
    rep.assert_that("omega_partition", std::abs(omega_sum[x] - expect) <= 1e-12, "point " + std::to_string(x));
    rep.assert_that("cz5", phi_sum[x] <= dec.kappa * dec.lambda * (1.0 + tol), "point " + std::to_string(x));
    const double scale = std::max({std::abs(f[x]), std::abs(dec.g[x]), std::abs(b_sum[x]), 1e-300});
    rep.assert_that("reconstruction", std::abs(dec.g[x] + b_sum[x] - f[x]) <= tol * scale,
                    "point " + std::to_string(x));
    max_g = std::max(max_g, std::abs(dec.g[x]) / dec.lambda);
    rep.assert_that("good_part_bound", std::abs(dec.g[x]) <= (1.0 + dec.kappa) * dec.lambda * (1.0 + tol),
                    "point " + std::to_string(x));
  }

  double mu_union = 0.0;
  for (PointIndex x = 0; x < n; ++x) {
    bool in = false;
    for (const auto& blk : dec.blocks) in = in || contains(space, blk.q.dilate(kStopDilation), x);
    if (in) mu_union += space.mass(x);
  }
  rep.assert_that("union_measure", mu_union <= dec.beta0 / lp * sum_q_power * (1.0 + tol) &&
                                       sum_q_power <= norm_pp * (1.0 + tol));
  if (dec.p == 1.0 && m > 0) rep.assert_that("cz6_constant_two", c6 <= 2.0 * (1.0 + tol));

  // Bad blocks as atomic blocks.
  double hardy_sum = 0.0;
  bool blocks_valid = true;
  for (std::size_t i = 0; i < m; ++i) {
    const auto block = cz_atomic_block(index, f, dec, i);
    const auto v = atomic_block_validate(space, lam, block);
    blocks_valid = blocks_valid && v.valid;
    if (!v.valid) rep.witness["invalid_block"] = i;
    hardy_sum += v.norm;
  }
  rep.assert_that("atomic_blocks_valid", blocks_valid);

  rep.set("c1", dec.c1);
  rep.set("c2", dec.c2);
  rep.set("cz6_constant", c6);
  rep.set("cz6p_constant", c61);
  rep.set("max_k_qr", max_k);
  rep.set("max_good_over_lambda", max_g);
  rep.set("hardy_upper", hardy_sum);
  rep.set("cz8_constant", norm_pp > 0.0 ? hardy_sum * std::pow(dec.lambda, dec.p - 1.0) / norm_pp : 0.0);
  return rep;
}

nlohmann::json to_json(const CZDecomposition& dec) {
  nlohmann::json j;
  j["lambda"] = dec.lambda;
  j["p"] = dec.p;
  j["beta0"] = dec.beta0;
  j["dilation"] = dec.dilation;
  j["c1"] = dec.c1;
  j["c2"] = dec.c2;
  j["kappa"] = dec.kappa;
  j["order"] = dec.order;
  j["g"] = dec.g;
  auto blocks = nlohmann::json::array();
  for (const auto& b : dec.blocks) {
    blocks.push_back({{"q", {{"center", b.q.center}, {"radius", b.q.radius}}},
                      {"r", {{"center", b.r.center}, {"radius", b.r.radius}}},
                      {"steps", b.steps},
                      {"alpha", b.alpha},
                      {"a", b.a},
                      {"overlapped", b.overlapped}});
  }
  j["blocks"] = blocks;
  return j;
}

CZDecomposition cz_from_json(const nlohmann::json& j) {
  CZDecomposition dec;
  dec.lambda = j.at("lambda").get<double>();
  dec.p = j.at("p").get<double>();
  dec.beta0 = j.at("beta0").get<double>();
  dec.dilation = j.value("dilation", 6.0);
  dec.c1 = j.value("c1", 0.0);
  dec.c2 = j.value("c2", 0.0);
  dec.kappa = j.at("kappa").get<double>();
  dec.order = j.value("order", std::vector<std::size_t>{});
  dec.g = j.at("g").get<std::vector<double>>();
  for (const auto& b : j.at("blocks")) {
    CZBlock blk;
    blk.q = {b.at("q").at("center").get<PointIndex>(), b.at("q").at("radius").get<double>()};
    blk.r = {b.at("r").at("center").get<PointIndex>(), b.at("r").at("radius").get<double>()};
    blk.steps = b.value("steps", std::size_t{1});
    blk.alpha = b.at("alpha").get<double>();
    blk.a = b.at("a").get<std::vector<PointIndex>>();
    blk.overlapped = b.value("overlapped", false);
    dec.blocks.push_back(std::move(blk));
  }
  return dec;
}

}  // namespace nhcz
