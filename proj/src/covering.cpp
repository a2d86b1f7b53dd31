#include "nhcz/covering.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <numeric>

#include "nhcz/errors.hpp"

namespace nhcz {

namespace {

/// Member set of a ball as a packed bit vector.
class Bits {
 public:
  explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

  static Bits of(const DiscreteSpace& space, const Ball& b) {
    Bits s(space.size());
    const auto row = space.distance_row(b.center);
    for (PointIndex y = 0; y < space.size(); ++y)
      if (row[y] <= b.radius) s.set(y);
    return s;
  }

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  bool intersects(const Bits& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & o.words_[w]) return true;
    return false;
  }
  bool subset_of(const Bits& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~o.words_[w]) return false;
    return true;
  }
  Bits& operator|=(const Bits& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }
  friend bool operator==(const Bits&, const Bits&) = default;

 private:
  std::vector<std::uint64_t> words_;
};

void check_family(const DiscreteSpace& space, std::span<const Ball> balls) {
  if (balls.empty()) throw ArgumentError("covering needs a nonempty family of balls");
  for (const Ball& b : balls)
    if (b.center >= space.size() || !(b.radius > 0.0)) throw ArgumentError("invalid ball in covering family");
}

std::vector<std::size_t> greedy_order(std::span<const Ball> balls) {
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return balls[a].radius > balls[b].radius; });
  return order;
}

std::vector<std::size_t> greedy_select(const DiscreteSpace& space, std::span<const Ball> balls) {
  Bits taken(space.size());
  std::vector<std::size_t> selected;
  for (std::size_t i : greedy_order(balls)) {
    const Bits m = Bits::of(space, balls[i]);
    if (m.intersects(taken)) continue;
    taken |= m;
    selected.push_back(i);
  }
  return selected;
}

void fill_overlap(const DiscreteSpace& space, std::span<const Ball> balls, CoverSelection& sel) {
  sel.overlap.assign(space.size(), 0);
  for (std::size_t i : sel.selected) {
    const Ball d = balls[i].dilate(sel.dilation);
    const auto row = space.distance_row(d.center);
    for (PointIndex y = 0; y < space.size(); ++y)
      if (row[y] <= d.radius) ++sel.overlap[y];
  }
}

Bits union_of(const DiscreteSpace& space, std::span<const Ball> balls, std::span<const std::size_t> which,
              double dilation) {
  Bits u(space.size());
  for (std::size_t i : which) u |= Bits::of(space, balls[i].dilate(dilation));
  return u;
}

}  // namespace

std::size_t CoverSelection::max_overlap() const {
  return overlap.empty() ? 0 : *std::max_element(overlap.begin(), overlap.end());
}

double vitali_dilation(const DiscreteSpace& space) {
  const double a = space.quasi_constant();
  return a == 1.0 ? 5.0 : 2.0 * a * a + 3.0 * a;
}

double finite_overlap_dilation(const DiscreteSpace& space) {
  const double a = space.quasi_constant();
  return a == 1.0 ? 6.0 : 2.0 * a * a + 3.0 * a + 1.0;
}

CoverSelection vitali_cover(const DiscreteSpace& space, std::span<const Ball> balls) {
  check_family(space, balls);
  CoverSelection sel;
  sel.dilation = vitali_dilation(space);
  sel.selected = greedy_select(space, balls);
  fill_overlap(space, balls, sel);
#ifndef NDEBUG
  assert(check_cover(space, balls, sel).passed());
#endif
  return sel;
}

CoverSelection finite_overlap_cover(const DiscreteSpace& space, std::span<const Ball> balls) {
  check_family(space, balls);
  CoverSelection sel;
  sel.dilation = finite_overlap_dilation(space);
  const std::vector<std::size_t> chosen = greedy_select(space, balls);

  std::vector<Bits> dil;
  std::vector<std::size_t> size;
  for (std::size_t i : chosen) {
    dil.push_back(Bits::of(space, balls[i].dilate(sel.dilation)));
    size.push_back(dil.back().count());
  }
  // Drop a ball whose dilate sits inside another kept dilate; equal dilates keep the lower index.
  std::vector<std::size_t> by_size(chosen.size());
  std::iota(by_size.begin(), by_size.end(), std::size_t{0});
  std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    return size[a] < size[b] || (size[a] == size[b] && chosen[a] > chosen[b]);
  });
  std::vector<char> kept(chosen.size(), 1);
  for (std::size_t a : by_size) {
    for (std::size_t b = 0; b < chosen.size(); ++b) {
      if (b == a || !kept[b] || !dil[a].subset_of(dil[b])) continue;
      if (!(dil[a] == dil[b]) || chosen[b] < chosen[a]) {
        kept[a] = 0;
        break;
      }
    }
  }

  std::vector<std::size_t> all(balls.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Bits need = union_of(space, balls, all, 1.0);
  while (true) {
    std::vector<std::size_t> current;
    for (std::size_t k = 0; k < chosen.size(); ++k)
      if (kept[k]) current.push_back(chosen[k]);
    const Bits have = union_of(space, balls, current, sel.dilation);
    if (need.subset_of(have)) break;
    // Re-admit the first dropped ball whose dilate reaches an uncovered point.
    bool repaired = false;
    for (std::size_t k = 0; k < chosen.size() && !repaired; ++k) {
      if (kept[k]) continue;
      for (PointIndex y = 0; y < space.size(); ++y)
        if (need.test(y) && !have.test(y) && dil[k].test(y)) {
          kept[k] = 1;
          repaired = true;
          break;
        }
    }
    if (!repaired) throw ConstructionError("finite overlap cover could not restore coverage");
  }
  for (std::size_t k = 0; k < chosen.size(); ++k)
    (kept[k] ? sel.selected : sel.pruned).push_back(chosen[k]);
  fill_overlap(space, balls, sel);
#ifndef NDEBUG
  assert(check_cover(space, balls, sel).disjoint && check_cover(space, balls, sel).covering);
#endif
  return sel;
}

CoverCheck check_cover(const DiscreteSpace& space, std::span<const Ball> balls, const CoverSelection& sel) {
  CoverCheck chk;
  std::vector<Bits> members;
  members.reserve(balls.size());
  for (const Ball& b : balls) members.push_back(Bits::of(space, b));

  for (std::size_t a = 0; a < sel.selected.size(); ++a)
    for (std::size_t b = a + 1; b < sel.selected.size(); ++b)
      if (members[sel.selected[a]].intersects(members[sel.selected[b]])) {
        chk.disjoint = false;
        chk.detail = "selected balls " + std::to_string(sel.selected[a]) + " and " +
                     std::to_string(sel.selected[b]) + " intersect";
      }

  const Bits have = union_of(space, balls, sel.selected, sel.dilation);
  for (std::size_t i = 0; i < balls.size(); ++i)
    if (!members[i].subset_of(have)) {
      chk.covering = false;
      chk.detail = "input ball " + std::to_string(i) + " is not covered";
    }

  std::vector<char> status(balls.size(), 0);
  for (std::size_t i : sel.selected) status[i] = 1;
  for (std::size_t i : sel.pruned) {
    status[i] = 2;
    const Bits d = Bits::of(space, balls[i].dilate(sel.dilation));
    bool inside = false;
    for (std::size_t j : sel.selected)
      if (d.subset_of(Bits::of(space, balls[j].dilate(sel.dilation)))) {
        inside = true;
        break;
      }
    if (!inside) {
      chk.greedy_structure = false;
      chk.detail = "pruned ball " + std::to_string(i) + " has no selected dilate containing its own";
    }
  }
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (status[i]) continue;
    bool ok = false;
    for (std::size_t j = 0; j < balls.size() && !ok; ++j)
      ok = status[j] != 0 && balls[j].radius >= balls[i].radius && members[i].intersects(members[j]);
    if (!ok) {
      chk.greedy_structure = false;
      chk.detail = "rejected ball " + std::to_string(i) + " meets no larger selected ball";
    }
  }
  return chk;
}

}  // namespace nhcz
