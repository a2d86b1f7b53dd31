#pragma once

#include <span>
#include <string>
#include <vector>

#include "nhcz/balls.hpp"

namespace nhcz {

struct CoverSelection {
  /// Indices into the input family, in selection order.
  std::vector<std::size_t> selected;
  /// Dilation applied to the selected balls for the covering property.
  double dilation = 5.0;
  /// Per point: number of dilated selected balls containing it.
  std::vector<std::size_t> overlap;
  /// Greedy picks removed by the nested-dilate pruning of finite_overlap_cover.
  std::vector<std::size_t> pruned;

  std::size_t max_overlap() const;
};

/// 5 for metric spaces, 2A^2 + 3A for quasi-metric spaces with constant A.
double vitali_dilation(const DiscreteSpace& space);
/// 6 for metric spaces, 2A^2 + 3A + 1 otherwise.
double finite_overlap_dilation(const DiscreteSpace& space);

/// Greedy disjoint selection by radius descending (ties by input index).
/// The union of the family is covered by the vitali_dilation()-dilates of the selection.
CoverSelection vitali_cover(const DiscreteSpace& space, std::span<const Ball> balls);

/// Vitali selection pruned so that no two selected 6-dilates are nested.
/// Coverage is re-verified after pruning and repaired by re-admitting dropped balls.
CoverSelection finite_overlap_cover(const DiscreteSpace& space, std::span<const Ball> balls);

struct CoverCheck {
  bool disjoint = true;
  bool covering = true;
  /// Every rejected ball meets a selected ball of radius >= its own; every
  /// pruned ball has its dilate inside a selected dilate.
  bool greedy_structure = true;
  std::string detail;

  bool passed() const { return disjoint && covering && greedy_structure; }
};

/// Exact set-inclusion verification of a selection against its input family.
CoverCheck check_cover(const DiscreteSpace& space, std::span<const Ball> balls, const CoverSelection& sel);

}  // namespace nhcz
