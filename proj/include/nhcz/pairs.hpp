#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "nhcz/ball_index.hpp"

namespace nhcz {

/// Applies NHCZ_THREADS (if set) to the OpenMP runtime. Returns the thread count in use.
int configure_threads_from_env();

struct PairScanOptions {
  /// Pair budget per evaluation point; the scan is exact while the number of
  /// nested pairs stays within pair_cap * point_count.
  std::size_t pair_cap = 100000;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

/// Per candidate ball Q: the best value over balls R containing Q.
struct PairScan {
  std::vector<double> best;
  std::vector<BallId> partner;
  std::size_t total_pairs = 0;
  std::size_t visited = 0;
  bool exact = true;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Failures before the first success of a Bernoulli(p) sequence.
inline std::uint64_t geometric_skip(std::uint64_t& state, double log_q) {
  const double u = (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
  const double g = std::floor(std::log(u) / log_q);
  return g >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() / 2 : static_cast<std::uint64_t>(g);
}

/// Walks every candidate ball Q (ascending rank per center) while maintaining, for
/// each other center c, the first admissible R at c that contains Q.
template <class OnBall>
void walk_containing(const BallIndex& index, const std::vector<std::vector<BallId>>& rlist, PointIndex cq,
                     std::vector<double>& reach, std::vector<std::size_t>& ptr, OnBall&& on_ball) {
  const std::size_t n = index.point_count();
  std::fill(reach.begin(), reach.end(), 0.0);
  std::fill(ptr.begin(), ptr.end(), std::size_t{0});
  const auto ord = index.order(cq);
  std::size_t added = 0;
  for (std::size_t k = 0; k < index.rank_count(cq); ++k) {
    const BallId q = index.id(cq, k);
    const std::size_t cnt = index.member_count(q);
    for (; added < cnt; ++added) {
      const auto row = index.space().distance_row(ord[added]);
      for (PointIndex c = 0; c < n; ++c) reach[c] = std::max(reach[c], row[c]);
    }
    for (PointIndex c = 0; c < n; ++c) {
      const auto& lst = rlist[c];
      while (ptr[c] < lst.size() && index.radius(lst[ptr[c]]) < reach[c]) ++ptr[c];
    }
    on_ball(q);
  }
}

}  // namespace detail

/// For every candidate Q with q_ok[Q], maximizes value(Q, R) over candidate balls
/// R with r_ok[R] and Q a subset of R (member sets). Above the budget the pairs
/// are subsampled by per-Q seeded Bernoulli draws, independent of value.
template <class Value>
PairScan scan_nested_pairs(const BallIndex& index, std::span<const char> q_ok, std::span<const char> r_ok,
                           Value&& value, const PairScanOptions& opt = {}) {
  const std::size_t n = index.point_count();
  PairScan out;
  out.best.assign(index.ball_count(), -std::numeric_limits<double>::infinity());
  out.partner.assign(index.ball_count(), 0);

  std::vector<std::vector<BallId>> rlist(n);
  for (BallId b = 0; b < index.ball_count(); ++b)
    if (r_ok[b]) rlist[index.center_of(b)].push_back(b);

  std::size_t total = 0;
#pragma omp parallel reduction(+ : total)
  {
    std::vector<double> reach(n);
    std::vector<std::size_t> ptr(n);
#pragma omp for schedule(dynamic)
    for (PointIndex cq = 0; cq < n; ++cq)
      detail::walk_containing(index, rlist, cq, reach, ptr, [&](BallId q) {
        if (!q_ok[q]) return;
        for (PointIndex c = 0; c < n; ++c) total += rlist[c].size() - ptr[c];
      });
  }
  out.total_pairs = total;
  const double budget = static_cast<double>(opt.pair_cap) * static_cast<double>(n);
  out.exact = static_cast<double>(total) <= budget;
  const double log_q = out.exact ? 0.0 : std::log1p(-budget / static_cast<double>(total));

  std::size_t visited = 0;
#pragma omp parallel reduction(+ : visited)
  {
    std::vector<double> reach(n);
    std::vector<std::size_t> ptr(n);
#pragma omp for schedule(dynamic)
    for (PointIndex cq = 0; cq < n; ++cq)
      detail::walk_containing(index, rlist, cq, reach, ptr, [&](BallId q) {
        if (!q_ok[q]) return;
        double best = out.best[q];
        BallId arg = out.partner[q];
        auto visit = [&](BallId r) {
          const double v = value(q, r);
          ++visited;
          if (v > best) {
            best = v;
            arg = r;
          }
        };
        if (out.exact) {
          for (PointIndex c = 0; c < n; ++c)
            for (std::size_t t = ptr[c]; t < rlist[c].size(); ++t) visit(rlist[c][t]);
        } else {
          std::uint64_t state = opt.seed ^ (0xd1b54a32d192ed03ULL * (q + 1));
          std::uint64_t next = detail::geometric_skip(state, log_q);
          std::uint64_t base = 0;
          for (PointIndex c = 0; c < n; ++c) {
            const std::uint64_t len = rlist[c].size() - ptr[c];
            while (next < base + len) {
              visit(rlist[c][ptr[c] + (next - base)]);
              next += 1 + detail::geometric_skip(state, log_q);
            }
            base += len;
          }
        }
        out.best[q] = best;
        out.partner[q] = arg;
      });
  }
  out.visited = visited;
  return out;
}

/// For every point x, the maximum of ball_value over candidate balls containing x.
/// witness (optional) receives the maximizing ball; ties keep the smallest ball id.
std::vector<double> sup_over_containing(const BallIndex& index, std::span<const double> ball_value,
                                        std::vector<BallId>* witness = nullptr);

}  // namespace nhcz
