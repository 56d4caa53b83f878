#pragma once
// Decomposition accuracy metrics against a known ground-truth grouping.

#include <algorithm>
#include <iterator>
#include <optional>
#include <vector>

#include "csg/problem.hpp"

namespace csg {

/// Ground-truth description used by the accuracy metrics: which variables are
/// separable (any flavor) and how the remaining ones group together.
struct GroundTruth {
  IndexSet separable;
  GroupList nonseparable_groups;
};

inline GroundTruth truth_from(const GroupingResult& g) {
  return {g.separable_union(), g.nonseparable_groups};
}

/// Separability accuracy: fraction of truly separable variables that the
/// decomposer also labeled separable. Undefined when no variable is separable.
inline std::optional<double> separability_accuracy(const GroundTruth& truth,
                                                   const GroupingResult& got) {
  if (truth.separable.empty()) return std::nullopt;
  IndexSet found = got.separable_union();
  IndexSet truth_sorted = truth.separable;
  std::sort(truth_sorted.begin(), truth_sorted.end());
  IndexSet common;
  std::set_intersection(truth_sorted.begin(), truth_sorted.end(), found.begin(),
                        found.end(), std::back_inserter(common));
  return double(common.size()) / double(truth_sorted.size());
}

/// Nonseparable-grouping accuracy. True groups are matched greedily in
/// descending size (ties broken by smallest contained index) against the
/// formed groups; each formed group can be consumed at most once. The score
/// is the matched-overlap mass over the total true-group mass.
inline std::optional<double> grouping_accuracy(const GroundTruth& truth,
                                               const GroupingResult& got) {
  if (truth.nonseparable_groups.empty()) return std::nullopt;
  GroupList true_groups = truth.nonseparable_groups;
  for (auto& g : true_groups) std::sort(g.begin(), g.end());
  std::sort(true_groups.begin(), true_groups.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  GroupList formed = got.nonseparable_groups;
  for (auto& g : formed) std::sort(g.begin(), g.end());
  std::vector<char> used(formed.size(), 0);

  std::size_t matched = 0, total = 0;
  for (const auto& tg : true_groups) {
    total += tg.size();
    std::size_t best = formed.size(), best_overlap = 0;
    for (std::size_t j = 0; j < formed.size(); ++j) {
      if (used[j]) continue;
      IndexSet common;
      std::set_intersection(tg.begin(), tg.end(), formed[j].begin(), formed[j].end(),
                            std::back_inserter(common));
      if (common.size() > best_overlap) {
        best_overlap = common.size();
        best = j;
      }
    }
    if (best < formed.size()) {
      used[best] = 1;
      matched += best_overlap;
    }
  }
  return double(matched) / double(total);
}

struct AccuracyReport {
  std::optional<double> sa;
  std::optional<double> na;
};

inline AccuracyReport score(const GroundTruth& truth, const GroupingResult& got) {
  return {separability_accuracy(truth, got), grouping_accuracy(truth, got)};
}

}  // namespace csg
