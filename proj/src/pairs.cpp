#include "nhcz/pairs.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nhcz {

int configure_threads_from_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("NHCZ_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> sup_over_containing(const BallIndex& index, std::span<const double> ball_value,
                                        std::vector<BallId>* witness) {
  const std::size_t n = index.point_count();
  std::vector<double> out(n, -std::numeric_limits<double>::infinity());
  std::vector<BallId> arg(n, 0);
  std::vector<double> suffix;
  std::vector<BallId> suffix_arg;
  for (PointIndex c = 0; c < n; ++c) {
    const std::size_t ranks = index.rank_count(c);
    suffix.assign(ranks, 0.0);
    suffix_arg.assign(ranks, 0);
    for (std::size_t k = ranks; k-- > 0;) {
      const BallId b = index.id(c, k);
      suffix[k] = ball_value[b];
      suffix_arg[k] = b;
      if (k + 1 < ranks && !(ball_value[b] >= suffix[k + 1])) {
        suffix[k] = suffix[k + 1];
        suffix_arg[k] = suffix_arg[k + 1];
      }
    }
    // The point at position pos of order(c) lies in every rank whose ball has more than pos members.
    const auto ord = index.order(c);
    std::size_t k = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      while (k < ranks && index.member_count(index.id(c, k)) <= pos) ++k;
      if (k == ranks) break;
      const PointIndex y = ord[pos];
      if (suffix[k] > out[y]) {
        out[y] = suffix[k];
        arg[y] = suffix_arg[k];
      }
    }
  }
  if (witness) *witness = std::move(arg);
  return out;
}

}  // namespace nhcz
