#pragma once
// Black-box problem abstraction: bounds, objective closure, and a per-stage
// fitness-evaluation ledger shared by all decomposers and optimizers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace csg {

using Vec = std::vector<double>;
using IndexSet = std::vector<std::size_t>;
using GroupList = std::vector<IndexSet>;

enum class Stage { additive, msvd, gss, gsvd, nvg, baseline, optimization };

struct BudgetExhausted : std::runtime_error {
  BudgetExhausted() : std::runtime_error("fitness-evaluation budget exhausted") {}
};

struct NonFiniteObjective : std::runtime_error {
  NonFiniteObjective() : std::runtime_error("objective returned a non-finite value at a probe point") {}
};

/// Per-stage evaluation counters. Counters only ever increase; when a budget
/// is set, an evaluation that would exceed it raises BudgetExhausted.
class FeLedger {
public:
  std::int64_t additive_stage = 0;
  std::int64_t msvd_stage = 0;
  std::int64_t gss_stage = 0;
  std::int64_t gsvd_stage = 0;
  std::int64_t nvg_stage = 0;
  std::int64_t baseline = 0;
  std::int64_t optimization = 0;
  std::optional<std::int64_t> budget;

  std::int64_t total() const {
    return additive_stage + msvd_stage + gss_stage + gsvd_stage + nvg_stage +
           baseline + optimization;
  }

  std::int64_t& counter(Stage s) {
    switch (s) {
      case Stage::additive: return additive_stage;
      case Stage::msvd: return msvd_stage;
      case Stage::gss: return gss_stage;
      case Stage::gsvd: return gsvd_stage;
      case Stage::nvg: return nvg_stage;
      case Stage::baseline: return baseline;
      case Stage::optimization: return optimization;
    }
    throw std::logic_error("unknown stage");
  }

  void charge(Stage s) {
    if (budget && total() + 1 > *budget) throw BudgetExhausted{};
    ++counter(s);
  }

  std::int64_t remaining() const {
    return budget ? *budget - total() : std::numeric_limits<std::int64_t>::max();
  }
};

class ObjectiveProblem {
public:
  using Objective = std::function<double(const Vec&)>;

  ObjectiveProblem(Vec lb, Vec ub, Objective fn)
      : lb_(std::move(lb)), ub_(std::move(ub)), fn_(std::move(fn)),
        ledger_(std::make_shared<FeLedger>()) {
    if (lb_.size() != ub_.size() || lb_.empty())
      throw std::invalid_argument("bounds must be non-empty and of equal length");
    for (std::size_t i = 0; i < lb_.size(); ++i)
      if (!(lb_[i] < ub_[i]))
        throw std::invalid_argument("lb[i] < ub[i] required for all i");
  }

  std::size_t dimension() const { return lb_.size(); }
  const Vec& lower() const { return lb_; }
  const Vec& upper() const { return ub_; }
  double range(std::size_t i) const { return ub_[i] - lb_[i]; }

  Vec midpoint() const {
    Vec m(dimension());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (lb_[i] + ub_[i]);
    return m;
  }

  double raw(const Vec& x) const { return fn_(x); }

  const std::shared_ptr<FeLedger>& ledger() const { return ledger_; }
  FeLedger& fe() const { return *ledger_; }

private:
  Vec lb_, ub_;
  Objective fn_;
  std::shared_ptr<FeLedger> ledger_;
};

/// The only window onto the black box: every call increments exactly one
/// stage counter. No caching here; reuse of corner values is explicit in the
/// decomposers so ledger counts stay exact.
inline double evaluate(const ObjectiveProblem& p, const Vec& x, Stage stage) {
  p.fe().charge(stage);
  return p.raw(x);
}

/// Output of every decomposer: three separable-variable classes plus the
/// non-separable groups. Index sets are kept sorted.
struct GroupingResult {
  IndexSet additively_separable;        // S1
  IndexSet multiplicatively_separable;  // S2
  IndexSet generally_separable;         // S3
  GroupList nonseparable_groups;        // N

  IndexSet separable_union() const {
    IndexSet u;
    u.insert(u.end(), additively_separable.begin(), additively_separable.end());
    u.insert(u.end(), multiplicatively_separable.begin(), multiplicatively_separable.end());
    u.insert(u.end(), generally_separable.begin(), generally_separable.end());
    std::sort(u.begin(), u.end());
    return u;
  }

  /// Disjoint and exhaustive over {0, ..., n-1}.
  bool valid_partition(std::size_t n) const {
    std::vector<int> seen(n, 0);
    auto mark = [&](const IndexSet& s) {
      for (auto i : s) {
        if (i >= n || seen[i]) return false;
        seen[i] = 1;
      }
      return true;
    };
    if (!mark(additively_separable) || !mark(multiplicatively_separable) ||
        !mark(generally_separable))
      return false;
    for (const auto& g : nonseparable_groups) {
      if (g.empty() || !mark(g)) return false;
    }
    for (auto v : seen)
      if (!v) return false;
    return true;
  }
};

}  // namespace csg
