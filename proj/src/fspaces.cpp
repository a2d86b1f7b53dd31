#include "nhcz/fspaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nhcz/errors.hpp"
#include "nhcz/maximal.hpp"

namespace nhcz {

namespace {

constexpr double kTol = 1e-9;

double mean_abs_tol(const DiscreteSpace& space, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s = std::max(s, std::abs(f[x]));
  (void)space;
  return s;
}

std::vector<double> ball_means(const BallIndex& index, std::span<const double> f) {
  const BallIntegrals integ(index, f);
  std::vector<double> m(index.ball_count(), 0.0);
  for (BallId b = 0; b < index.ball_count(); ++b) {
    const double mu = index.measure(b);
    if (mu > 0.0) m[b] = integ.integral(b) / mu;
  }
  return m;
}

nlohmann::json ball_json(const Ball& b) { return {{"center", b.center}, {"radius", b.radius}}; }

Ball ball_from_json(const nlohmann::json& j) {
  return {j.at("center").get<PointIndex>(), j.at("radius").get<double>()};
}

}  // namespace

std::vector<double> canonical_ball_values(const BallIndex& index, std::span<const double> f, double beta0) {
  check_function(index.space(), f);
  const auto hulls = doubling_hulls(index, beta0);
  const auto m = ball_means(index, f);
  std::vector<double> out(index.ball_count());
  for (BallId b = 0; b < index.ball_count(); ++b) out[b] = m[hulls[b]];
  return out;
}

nlohmann::json RBMOEstimate::to_json() const {
  return {{"c_b", c_b},
          {"c_b_single", c_b_single},
          {"c_b_pair", c_b_pair},
          {"c_c", c_c},
          {"c_c_single", c_c_single},
          {"c_c_pair", c_c_pair},
          {"c_canonical", c_canonical},
          {"c_canonical_single", c_canonical_single},
          {"c_canonical_pair", c_canonical_pair},
          {"witness_ball", ball_json(witness_ball)},
          {"witness_q", ball_json(witness_q)},
          {"witness_r", ball_json(witness_r)},
          {"exact", exact},
          {"pairs_total", pairs_total},
          {"pairs_visited", pairs_visited}};
}

RBMOEstimate rbmo_estimate(const BallIndex& index, std::span<const double> f, const DoublingParams& params,
                           const PairScanOptions& pairs) {
  const DiscreteSpace& space = index.space();
  check_function(space, f);
  params.check(index.lambda());
  const std::size_t nb = index.ball_count();
  const auto mean = ball_means(index, f);
  const auto hulls = doubling_hulls(index, params.beta0);
  const auto flags = doubling_flags(index, 6.0, params.beta0);

  std::vector<double> mu(nb), dil(nb, 0.0);
  std::vector<char> positive(nb, 0), doubling(nb, 0);
  for (BallId b = 0; b < nb; ++b) {
    mu[b] = index.measure(b);
    positive[b] = mu[b] > 0.0;
    doubling[b] = positive[b] && flags[b];
    if (positive[b]) dil[b] = index.measure_within(index.center_of(b), 6.0 * index.radius(b)) / mu[b];
  }

  RBMOEstimate est;
  std::vector<double> single_b(nb, 0.0), single_c(nb, 0.0), single_k(nb, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (BallId b = 0; b < nb; ++b) {
    if (!positive[b]) continue;
    const double fb = mean[hulls[b]];
    double own = 0.0, canon = 0.0;
    for (const PointIndex y : index.members(b)) {
      own += std::abs(f[y] - mean[b]) * space.mass(y);
      canon += std::abs(f[y] - fb) * space.mass(y);
    }
    const double mu6 = dil[b] * mu[b];
    single_b[b] = own / mu6;
    single_k[b] = canon / mu6;
    if (doubling[b]) single_c[b] = own / mu[b];
  }
  for (BallId b = 0; b < nb; ++b) {
    if (single_b[b] > est.c_b_single) {
      est.c_b_single = single_b[b];
      est.witness_ball = to_ball(index, b);
    }
    est.c_c_single = std::max(est.c_c_single, single_c[b]);
    est.c_canonical_single = std::max(est.c_canonical_single, single_k[b]);
  }

  // All positive-mass pairs: the (b) pair term, with the canonical pair term on the same sample.
  std::vector<double> canon_pair(nb, 0.0);
  const auto all = scan_nested_pairs(
      index, positive, positive,
      [&](BallId q, BallId r) {
        const double k = index.k_coefficient(index.center_of(q), index.radius(q), index.radius(r));
        const double canon = std::abs(mean[hulls[q]] - mean[hulls[r]]) / k;
        if (canon > canon_pair[q]) canon_pair[q] = canon;
        return std::abs(mean[q] - mean[r]) / (k * (dil[q] + dil[r]));
      },
      pairs);
  const auto dbl = scan_nested_pairs(
      index, doubling, doubling,
      [&](BallId q, BallId r) {
        const double k = index.k_coefficient(index.center_of(q), index.radius(q), index.radius(r));
        return std::abs(mean[q] - mean[r]) / k;
      },
      pairs);
  for (BallId q = 0; q < nb; ++q) {
    if (all.best[q] > est.c_b_pair) {
      est.c_b_pair = all.best[q];
      est.witness_q = to_ball(index, q);
      est.witness_r = to_ball(index, all.partner[q]);
    }
    est.c_canonical_pair = std::max(est.c_canonical_pair, canon_pair[q]);
    est.c_c_pair = std::max(est.c_c_pair, dbl.best[q]);
  }
  est.c_b = std::max(est.c_b_single, est.c_b_pair);
  est.c_c = std::max(est.c_c_single, est.c_c_pair);
  est.c_canonical = std::max(est.c_canonical_single, est.c_canonical_pair);
  est.exact = all.exact && dbl.exact;
  est.pairs_total = all.total_pairs + dbl.total_pairs;
  est.pairs_visited = all.visited + dbl.visited;
  return est;
}

RBMOEstimate rbmo_estimate(const DiscreteSpace& space, const DominatingFunction& lambda, std::span<const double> f,
                           const DoublingParams& params, const PairScanOptions& pairs) {
  const BallIndex index(space, lambda);
  return rbmo_estimate(index, f, params, pairs);
}

double rbmo_norm_complex(const BallIndex& index, std::span<const Complex> f, const DoublingParams& params,
                         const PairScanOptions& pairs) {
  const auto re = real_part(f);
  const auto im = imag_part(f);
  double s = rbmo_estimate(index, re, params, pairs).norm();
  if (std::any_of(im.begin(), im.end(), [](double v) { return v != 0.0; }))
    s += rbmo_estimate(index, im, params, pairs).norm();
  return s;
}

CheckReport john_nirenberg_check(const BallIndex& index, std::span<const double> f, double p, double rho,
                                 const DoublingParams& params, const PairScanOptions& pairs) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("John-Nirenberg exponent must satisfy p >= 1");
  if (!(rho > 1.0)) throw ParameterError("John-Nirenberg dilation must exceed 1");
  const DiscreteSpace& space = index.space();
  CheckReport rep;
  rep.check = "john_nirenberg";
  rep.set("p", p);
  rep.set("rho", rho);
  const auto est = rbmo_estimate(index, f, params, pairs);
  rep.exact = est.exact;
  rep.set("rbmo", est.c_canonical);
  const auto fb = canonical_ball_values(index, f, params.beta0);
  double sup = 0.0;
  BallId arg = 0;
  for (BallId b = 0; b < index.ball_count(); ++b) {
    const double denom = index.measure_within(index.center_of(b), rho * index.radius(b));
    if (!(denom > 0.0)) continue;
    double s = 0.0;
    for (const PointIndex y : index.members(b)) s += std::pow(std::abs(f[y] - fb[b]), p) * space.mass(y);
    const double v = std::pow(s / denom, 1.0 / p);
    if (v > sup) {
      sup = v;
      arg = b;
    }
  }
  rep.set("oscillation", sup);
  rep.witness["ball"] = ball_json(to_ball(index, arg));
  if (!(est.c_canonical > 0.0)) {
    rep.vacuous = true;
    rep.set("constant", 0.0);
    return rep;
  }
  const double ratio = sup / est.c_canonical;
  rep.set("constant", ratio);
  if (p == 1.0 && rho == 6.0) rep.assert_that("p1_ratio_at_most_one", ratio <= 1.0 + kTol);
  return rep;
}

FunctionOnSpace AtomicBlock::value(std::size_t point_count) const {
  FunctionOnSpace v(point_count, 0.0);
  for (const auto& t : terms)
    for (std::size_t x = 0; x < point_count && x < t.atom.size(); ++x) v[x] += t.coefficient * t.atom[x];
  return v;
}

nlohmann::json AtomicBlock::to_json() const {
  nlohmann::json j;
  j["host"] = ball_json(host);
  j["variant"] = infinity ? "inf" : "p";
  j["p"] = p;
  j["rho"] = rho;
  auto ts = nlohmann::json::array();
  for (const auto& t : terms) {
    // Sparse atom: support indices with values.
    std::vector<std::size_t> idx;
    std::vector<double> val;
    for (std::size_t x = 0; x < t.atom.size(); ++x)
      if (t.atom[x] != 0.0) {
        idx.push_back(x);
        val.push_back(t.atom[x]);
      }
    ts.push_back({{"coefficient", t.coefficient},
                  {"ball", ball_json(t.ball)},
                  {"size", t.atom.size()},
                  {"support", idx},
                  {"values", val}});
  }
  j["terms"] = ts;
  return j;
}

AtomicBlock AtomicBlock::from_json(const nlohmann::json& j) {
  AtomicBlock b;
  b.host = ball_from_json(j.at("host"));
  b.infinity = j.value("variant", std::string("inf")) == "inf";
  b.p = j.value("p", 2.0);
  b.rho = j.value("rho", 6.0);
  for (const auto& t : j.at("terms")) {
    AtomTerm term;
    term.coefficient = t.at("coefficient").get<double>();
    term.ball = ball_from_json(t.at("ball"));
    term.atom.assign(t.at("size").get<std::size_t>(), 0.0);
    const auto idx = t.at("support").get<std::vector<std::size_t>>();
    const auto val = t.at("values").get<std::vector<double>>();
    if (idx.size() != val.size()) throw ArgumentError("atom support and values differ in length");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= term.atom.size()) throw ArgumentError("atom support index out of range");
      term.atom[idx[k]] = val[k];
    }
    b.terms.push_back(std::move(term));
  }
  return b;
}

BlockValidation atomic_block_validate(const DiscreteSpace& space, const DominatingFunction& lambda,
                                      const AtomicBlock& block) {
  BlockValidation v;
  const std::size_t n = space.size();
  auto fail = [&](const std::string& msg) {
    v.valid = false;
    v.failures.push_back(msg);
  };
  if (!(block.rho > 1.0)) fail("rho must exceed 1");
  if (!block.infinity && !(block.p > 1.0)) fail("p-atom blocks need p > 1");
  bool size_flagged = false;
  double scale = 0.0;
  for (std::size_t j = 0; j < block.terms.size(); ++j) {
    const auto& t = block.terms[j];
    const std::string tag = "term " + std::to_string(j);
    v.norm += std::abs(t.coefficient);
    if (t.atom.size() != n) {
      fail(tag + ": atom length differs from the space");
      continue;
    }
    for (std::size_t x = 0; x < n; ++x) scale += std::abs(t.coefficient * t.atom[x]) * space.mass(x);
    if (t.ball.center >= n || !(t.ball.radius > 0.0)) {
      fail(tag + ": invalid ball");
      continue;
    }
    if (!ball_subset(space, t.ball, block.host)) {
      fail(tag + ": ball not inside the host ball");
      continue;
    }
    for (std::size_t x = 0; x < n; ++x)
      if (t.atom[x] != 0.0 && space.distance(t.ball.center, x) > t.ball.radius) {
        fail(tag + ": atom not supported in its ball (point " + std::to_string(x) + ")");
        break;
      }
    const double k = coefficient_K(space, lambda, t.ball, block.host).value;
    const double mu_rho = ball_measure(space, t.ball.dilate(block.rho));
    double norm = 0.0, bound = 0.0;
    if (block.infinity) {
      for (std::size_t x = 0; x < n; ++x)
        if (space.mass(x) > 0.0) norm = std::max(norm, std::abs(t.atom[x]));
      bound = 1.0 / (mu_rho * k);
    } else {
      double s = 0.0;
      for (std::size_t x = 0; x < n; ++x) s += std::pow(std::abs(t.atom[x]), block.p) * space.mass(x);
      norm = std::pow(s, 1.0 / block.p);
      bound = std::pow(mu_rho, 1.0 / block.p - 1.0) / k;
    }
    if (norm > bound * (1.0 + kTol)) {
      std::ostringstream os;
      os << tag << ": size bound exceeded, norm " << norm << " > " << bound;
      fail(os.str());
      if (!size_flagged) {
        size_flagged = true;
        v.violating_term = j;
        v.margin = norm / bound - 1.0;
      }
    }
  }
  const auto total = block.value(n);
  double integral = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    integral += total[x] * space.mass(x);
    if (total[x] != 0.0 && space.distance(block.host.center, x) > block.host.radius) {
      fail("block not supported in the host ball (point " + std::to_string(x) + ")");
      break;
    }
  }
  if (std::abs(integral) > kTol * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "block integral " << integral << " is not zero";
    fail(os.str());
  }
  return v;
}

AtomicBlock cz_atomic_block(const BallIndex& index, std::span<const double> f, const CZDecomposition& dec,
                            std::size_t i) {
  const DiscreteSpace& space = index.space();
  const DominatingFunction& lam = index.lambda();
  const std::size_t n = space.size();
  const CZBlock& blk = dec.blocks.at(i);
  AtomicBlock out;
  out.host = blk.r;
  out.infinity = dec.p == 1.0;
  out.p = dec.p;
  out.rho = 6.0;

  const auto w = cz_omega(space, dec, i);
  FunctionOnSpace first(n, 0.0), second(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) first[x] = f[x] * w[x];
  for (const PointIndex x : blk.a) second[x] = -blk.alpha;
  const Ball balls[2] = {blk.q.dilate(dec.dilation), blk.r};
  const FunctionOnSpace* pieces[2] = {&first, &second};
  for (int j = 0; j < 2; ++j) {
    const auto& piece = *pieces[j];
    const double k = coefficient_K(space, lam, balls[j], out.host).value;
    const double mu_rho = ball_measure(space, balls[j].dilate(out.rho));
    double coef = 0.0;
    if (out.infinity) {
      coef = lp_norm(space, piece, std::numeric_limits<double>::infinity()) * mu_rho * k;
    } else {
      coef = lp_norm(space, piece, out.p) * std::pow(mu_rho, 1.0 - 1.0 / out.p) * k;
    }
    if (!(coef > 0.0)) continue;
    AtomTerm t;
    t.coefficient = coef;
    t.ball = balls[j];
    t.atom.resize(n);
    for (std::size_t x = 0; x < n; ++x) t.atom[x] = piece[x] / coef;
    out.terms.push_back(std::move(t));
  }
  return out;
}

HardyFromCZ hardy_from_cz(const BallIndex& index, std::span<const double> f, double lambda, double p,
                          const DoublingParams& params) {
  const DiscreteSpace& space = index.space();
  check_function(space, f);
  double integral = 0.0, l1 = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    integral += f[x] * space.mass(x);
    l1 += std::abs(f[x]) * space.mass(x);
  }
  if (std::abs(integral) > kTol * l1) throw ArgumentError("hardy_from_cz needs a mean-zero function");
  HardyFromCZ out;
  out.decomposition = cz_decompose(index, f, lambda, p, params);
  for (std::size_t i = 0; i < out.decomposition.blocks.size(); ++i) {
    out.blocks.push_back(cz_atomic_block(index, f, out.decomposition, i));
    for (const auto& t : out.blocks.back().terms) out.norm_upper += std::abs(t.coefficient);
  }
  return out;
}

CheckReport duality_pairing_check(const BallIndex& index, const AtomicBlock& block, std::span<const double> g,
                                  const DoublingParams& params, const PairScanOptions& pairs) {
  check_function(index.space(), g);
  return duality_pairing_check(index.space(), block, g, rbmo_estimate(index, g, params, pairs));
}

CheckReport duality_pairing_check(const DiscreteSpace& space, const AtomicBlock& block, std::span<const double> g,
                                  const RBMOEstimate& g_estimate) {
  check_function(space, g);
  CheckReport rep;
  rep.check = "duality";
  const auto b = block.value(space.size());
  double pairing = 0.0, scale = 0.0, hnorm = 0.0;
  for (std::size_t x = 0; x < b.size(); ++x) {
    pairing += b[x] * g[x] * space.mass(x);
    scale += std::abs(b[x] * g[x]) * space.mass(x);
  }
  for (const auto& t : block.terms) hnorm += std::abs(t.coefficient);
  rep.set("pairing", pairing);
  rep.set("block_norm", hnorm);
  if (!(hnorm > 0.0)) {
    rep.vacuous = true;
    rep.set("constant", 0.0);
    return rep;
  }
  rep.exact = g_estimate.exact;
  rep.set("rbmo", g_estimate.norm());
  if (!(g_estimate.norm() > 1e-12 * mean_abs_tol(space, g))) {
    // Essentially constant g: the pairing vanishes with the block's mean.
    rep.assert_that("constant_pairing_zero", std::abs(pairing) <= 1e-9 * std::max(scale, 1e-300));
    rep.set("constant", 0.0);
    return rep;
  }
  rep.set("constant", std::abs(pairing) / (hnorm * g_estimate.norm()));
  return rep;
}

CheckReport chain_inequality_check(const BallIndex& index, PointIndex center, std::span<const double> radii) {
  if (center >= index.point_count()) throw ArgumentError("chain center out of range");
  if (radii.size() < 2) throw ArgumentError("a chain needs at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ArgumentError("chain radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw ArgumentError("chain radii must be strictly ascending");
  }
  CheckReport rep;
  rep.check = "k_chain";
  const std::size_t links = radii.size() - 1;
  std::vector<double> k(links);
  for (std::size_t i = 0; i < links; ++i) k[i] = index.k_coefficient(center, radii[i], radii[i + 1]);

  std::size_t runs = 0, boundary_runs = 0, literal_failures = 0;
  double worst = 0.0;
  for (std::size_t s = 0; s < links;) {
    if (!(k[s] > 2.0)) {
      ++s;
      continue;
    }
    std::size_t e = s;
    while (e < links && k[e] > 2.0) ++e;
    // Run of links s..e-1, radii s..e.
    ++runs;
    double lhs = 0.0, boundary = 0.0;
    for (std::size_t i = s; i < e; ++i) lhs += k[i];
    for (std::size_t t = s + 1; t < e; ++t) boundary += index.annulus_sum(center, radii[t], radii[t]);
    const double rhs = 2.0 * index.k_coefficient(center, radii[s], radii[e]);
    worst = std::max(worst, lhs / rhs);
    const std::string tag = "radii " + std::to_string(s) + ".." + std::to_string(e);
    if (boundary == 0.0) {
      rep.assert_that("chain_inequality", lhs <= rhs * (1.0 + kTol), tag);
    } else {
      // Atoms exactly on an interior radius lie in two consecutive closed annuli.
      ++boundary_runs;
      if (!(lhs <= rhs * (1.0 + kTol))) ++literal_failures;
      rep.assert_that("chain_inequality_with_shared_spheres", lhs <= (rhs + 2.0 * boundary) * (1.0 + kTol), tag);
    }
    s = e;
  }
  rep.vacuous = runs == 0;
  rep.set("runs", static_cast<double>(runs));
  rep.set("runs_with_shared_spheres", static_cast<double>(boundary_runs));
  rep.set("literal_failures_with_shared_spheres", static_cast<double>(literal_failures));
  rep.set("max_ratio", worst);
  return rep;
}

CheckReport commutator_pointwise_check(const BallIndex& index, const Kernel& kernel, std::span<const double> b,
                                       std::span<const double> f, double p, const DoublingParams& params,
                                       const PairScanOptions& pairs) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("commutator estimate needs 1 < p < infinity");
  const DiscreteSpace& space = index.space();
  check_function(space, b);
  check_function(space, f);
  CheckReport rep;
  rep.check = "commutator";
  rep.set("p", p);
  const double eps = epsilon_min(space);
  const auto c = commutator_apply(space, kernel, b, f, eps);
  const auto re = real_part(c), im = imag_part(c);
  auto num = sharp_maximal(index, re, params, pairs);
  rep.exact = num.exact;
  if (std::any_of(im.begin(), im.end(), [](double v) { return v != 0.0; })) {
    const auto num_im = sharp_maximal(index, im, params, pairs);
    for (std::size_t x = 0; x < num.values.size(); ++x) num.values[x] += num_im.values[x];
  }
  const double cb = rbmo_estimate(index, b, params, pairs).norm();
  rep.set("rbmo_b", cb);
  const auto mpf = maximal_p(index, f, p, 5.0);
  const auto tf = modulus(apply_operator(space, kernel, f));
  const auto mptf = maximal_p(index, tf, p, 6.0);
  const auto tstar = maximal_truncated(space, kernel, f);
  double numerator_max = 0.0;
  for (const double v : num.values) numerator_max = std::max(numerator_max, v);
  rep.set("numerator_max", numerator_max);
  if (!(cb > 1e-12 * mean_abs_tol(space, b)) || lp_norm(space, f, 1.0) == 0.0) {
    rep.vacuous = true;
    rep.set("constant", 0.0);
    return rep;
  }
  double worst = 0.0;
  std::size_t used = 0;
  PointIndex arg = 0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    const double denom = cb * (mpf.values[x] + mptf.values[x] + tstar[x]);
    if (!(denom > 0.0)) continue;
    ++used;
    const double r = num.values[x] / denom;
    if (r > worst) {
      worst = r;
      arg = x;
    }
  }
  rep.vacuous = used == 0;
  rep.set("constant", worst);
  rep.witness["point"] = arg;
  return rep;
}

CheckReport rbmo_image_check(const BallIndex& index, const Kernel& kernel, std::span<const double> f,
                             const DoublingParams& params, const PairScanOptions& pairs) {
  const DiscreteSpace& space = index.space();
  CheckReport rep;
  rep.check = "rbmo_image";
  const double sup = lp_norm(space, f, std::numeric_limits<double>::infinity());
  rep.set("f_sup", sup);
  if (!(sup > 0.0)) {
    rep.vacuous = true;
    rep.set("constant", 0.0);
    return rep;
  }
  const auto tf = apply_operator(space, kernel, f);
  const double r = rbmo_norm_complex(index, tf, params, pairs);
  rep.set("rbmo_tf", r);
  rep.set("constant", r / sup);
  return rep;
}

CheckReport hardy_l1_check(const DiscreteSpace& space, const DominatingFunction& lambda, const Kernel& kernel,
                           const AtomicBlock& block) {
  CheckReport rep;
  rep.check = "hardy_l1";
  const auto v = atomic_block_validate(space, lambda, block);
  rep.assert_that("block_valid", v.valid, v.failures.empty() ? "" : v.failures.front());
  rep.set("block_norm", v.norm);
  if (!(v.norm > 0.0)) {
    rep.vacuous = true;
    rep.set("constant", 0.0);
    return rep;
  }
  const auto tb = modulus(apply_operator(space, kernel, block.value(space.size())));
  const double l1 = lp_norm(space, tb, 1.0);
  rep.set("tb_l1", l1);
  rep.set("constant", l1 / v.norm);
  return rep;
}

}  // namespace nhcz
