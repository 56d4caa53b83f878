#pragma once
// Baseline detectors: pairwise differential grouping, the recursive set-set
// interaction test, and the dual (log-domain) pairwise multiplicative test.

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "csg/decompose.hpp"
#include "csg/problem.hpp"

namespace csg {

struct NonpositiveFitness : std::runtime_error {
  NonpositiveFitness() : std::runtime_error("log-domain probe hit a non-positive fitness value") {}
};

struct InteractionMatrix {
  std::size_t n = 0;
  std::vector<char> data;

  explicit InteractionMatrix(std::size_t n_) : n(n_), data(n_ * n_, 0) {}
  bool at(std::size_t p, std::size_t q) const { return data[p * n + q]; }
  void set(std::size_t p, std::size_t q) {
    data[p * n + q] = 1;
    data[q * n + p] = 1;
  }
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

inline GroupingResult components_to_grouping(const InteractionMatrix& m, bool isolated_to_s2 = false) {
  UnionFind uf(m.n);
  for (std::size_t p = 0; p < m.n; ++p)
    for (std::size_t q = p + 1; q < m.n; ++q)
      if (m.at(p, q)) uf.unite(p, q);
  std::vector<IndexSet> comps(m.n);
  for (std::size_t i = 0; i < m.n; ++i) comps[uf.find(i)].push_back(i);
  GroupingResult out;
  for (auto& c : comps) {
    if (c.empty()) continue;
    if (c.size() == 1) {
      auto& dst = isolated_to_s2 ? out.multiplicatively_separable : out.additively_separable;
      dst.push_back(c.front());
    } else {
      out.nonseparable_groups.push_back(std::move(c));
    }
  }
  std::sort(out.additively_separable.begin(), out.additively_separable.end());
  std::sort(out.multiplicatively_separable.begin(), out.multiplicatively_separable.end());
  std::sort(out.nonseparable_groups.begin(), out.nonseparable_groups.end(),
            [](const IndexSet& a, const IndexSet& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace detail

/// Pairwise differential grouping over the corner probe scheme. Variables
/// with no detected interaction land in S1; the rest form connected
/// components. Costs exactly 2*C(n,2) + n + 1 evaluations.
inline std::pair<InteractionMatrix, GroupingResult> dg_pairwise(
    const ObjectiveProblem& p, std::optional<double> epsilon = {}) {
  const std::size_t n = p.dimension();
  if (n < 2) throw std::invalid_argument("dg_pairwise needs n >= 2");
  InteractionMatrix m(n);
  const double f_base = evaluate(p, p.lower(), Stage::baseline);
  Vec f_up(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec x = p.lower();
    x[i] = p.upper()[i];
    f_up[i] = evaluate(p, x, Stage::baseline);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      Vec xq = p.lower();
      xq[b] = p.upper()[b];
      const double f_q = evaluate(p, xq, Stage::baseline);
      xq[a] = p.upper()[a];
      const double f_pq = evaluate(p, xq, Stage::baseline);
      const double diff = std::fabs((f_up[a] - f_base) - (f_pq - f_q));
      const double thr =
          epsilon ? *epsilon : eps1_threshold(n, f_base, f_up[a], f_q, f_pq);
      if (diff > thr) m.set(a, b);
    }
  }
  return {m, detail::components_to_grouping(m)};
}

/// Set-set nonlinearity test: X1 and X2 are moved from the base corner to
/// the upper bound along unit directions spanning each set.
inline bool rdg_set_interact(const ObjectiveProblem& p, const IndexSet& X1, const IndexSet& X2) {
  if (X1.empty() || X2.empty()) return false;
  const std::size_t n = p.dimension();
  Vec base = p.lower();
  Vec xa = base, xb = base, xab = base;
  for (std::size_t i : X1) xa[i] = xab[i] = p.upper()[i];
  for (std::size_t i : X2) xb[i] = xab[i] = p.upper()[i];
  const double f0 = evaluate(p, base, Stage::baseline);
  const double fa = evaluate(p, xa, Stage::baseline);
  const double fb = evaluate(p, xb, Stage::baseline);
  const double fab = evaluate(p, xab, Stage::baseline);
  const double diff = std::fabs((fab - fb) - (fa - f0));
  return diff > eps1_threshold(n, f0, fa, fb, fab);
}

/// Recursive decomposition built on rdg_set_interact with binary splitting.
/// "RDG-like": no claim to reproduce RDG2's exact control flow or FE counts.
inline GroupingResult rdg_like_decompose(const ObjectiveProblem& p) {
  const std::size_t n = p.dimension();
  GroupingResult out;

  // all members of X2 interacting with X1, by recursive halving
  std::function<IndexSet(const IndexSet&, const IndexSet&)> interacting =
      [&](const IndexSet& X1, const IndexSet& X2) -> IndexSet {
    if (!rdg_set_interact(p, X1, X2)) return {};
    if (X2.size() == 1) return X2;
    const std::size_t half = X2.size() / 2;
    IndexSet left(X2.begin(), X2.begin() + half);
    IndexSet right(X2.begin() + half, X2.end());
    IndexSet got = interacting(X1, left);
    IndexSet r2 = interacting(X1, right);
    got.insert(got.end(), r2.begin(), r2.end());
    return got;
  };

  IndexSet remain(n);
  std::iota(remain.begin(), remain.end(), 0);
  IndexSet group{remain.front()};
  remain.erase(remain.begin());
  while (true) {
    IndexSet hits = remain.empty() ? IndexSet{} : interacting(group, remain);
    if (hits.empty()) {
      if (group.size() == 1)
        out.additively_separable.push_back(group.front());
      else {
        std::sort(group.begin(), group.end());
        out.nonseparable_groups.push_back(group);
      }
      if (remain.empty()) break;
      group = {remain.front()};
      remain.erase(remain.begin());
    } else {
      for (std::size_t h : hits) {
        group.push_back(h);
        remain.erase(std::find(remain.begin(), remain.end(), h));
      }
    }
  }
  std::sort(out.additively_separable.begin(), out.additively_separable.end());
  std::sort(out.nonseparable_groups.begin(), out.nonseparable_groups.end(),
            [](const IndexSet& a, const IndexSet& b) { return a.front() < b.front(); });
  return out;
}

/// Log-domain pairwise test: true when the pair is multiplicatively
/// separable, i.e. the finite-difference inequality fails to hold in the
/// log domain. Requires strictly positive fitness at the probe points.
inline bool ddg_pairwise_check(const ObjectiveProblem& p, std::size_t a, std::size_t b) {
  const std::size_t n = p.dimension();
  const double f_base = evaluate(p, p.lower(), Stage::baseline);
  Vec xa = p.lower(), xb = p.lower(), xab = p.lower();
  xa[a] = p.upper()[a];
  xb[b] = p.upper()[b];
  xab[a] = p.upper()[a];
  xab[b] = p.upper()[b];
  const double fa = evaluate(p, xa, Stage::baseline);
  const double fb = evaluate(p, xb, Stage::baseline);
  const double fab = evaluate(p, xab, Stage::baseline);
  if (f_base <= 0 || fa <= 0 || fb <= 0 || fab <= 0) throw NonpositiveFitness{};
  const double d1 = std::log(fa) - std::log(f_base);
  const double d2 = std::log(fab) - std::log(fb);
  const double thr =
      std::max(10.0 * gamma_coeff(n) * (std::fabs(d1) + std::fabs(d2) + 1.0), 1e-10);
  return std::fabs(d1 - d2) <= thr;
}

/// All-pairs DDG grouping: components of "not multiplicatively separable";
/// isolated variables count as (multiplicatively) separable.
inline GroupingResult ddg_decompose(const ObjectiveProblem& p) {
  const std::size_t n = p.dimension();
  InteractionMatrix m(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!ddg_pairwise_check(p, a, b)) m.set(a, b);
  return detail::components_to_grouping(m, /*isolated_to_s2=*/true);
}

}  // namespace csg
