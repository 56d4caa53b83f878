#pragma once
// Cooperative coevolution over a decomposition, with a self-adaptive DE
// (SaNSDE-style) as the subcomponent optimizer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "csg/problem.hpp"

namespace csg {

/// Turns a grouping into CC subcomponents: each separable class is chunked
/// into pieces of at most `cap` variables (classes are never mixed), and
/// every non-separable group becomes one subcomponent unchanged.
inline GroupList partition_separables(const GroupingResult& g, std::size_t cap = 50) {
  GroupList subs;
  auto chunk = [&](const IndexSet& s) {
    for (std::size_t b = 0; b < s.size(); b += cap)
      subs.emplace_back(s.begin() + b, s.begin() + std::min(b + cap, s.size()));
  };
  chunk(g.additively_separable);
  chunk(g.multiplicatively_separable);
  chunk(g.generally_separable);
  for (const auto& grp : g.nonseparable_groups) subs.push_back(grp);
  return subs;
}

struct SansdeConfig {
  std::size_t pop_size = 50;
  int learning_period = 50;   // generations between strategy/scale prob updates
  int crm_period = 25;        // generations between CRm refreshes
};

struct CcResult {
  Vec best;
  double best_fitness = std::numeric_limits<double>::infinity();
  // (fe, best-so-far) at every context improvement and at every checkpoint
  std::vector<std::pair<std::int64_t, double>> trace;
  // checkpoint samples only, one entry per requested checkpoint, in order
  std::vector<std::pair<std::int64_t, double>> checkpoint_trace;
};

namespace detail {

struct SubState {
  IndexSet vars;
  std::vector<Vec> pop;   // pop_size x vars.size()
  Vec fit;
  // self-adaptation state
  double strat_prob = 0.5;  // P(rand/1) vs current-to-best/1
  double scale_prob = 0.5;  // P(F ~ N(0.5, 0.3)) vs Cauchy
  double crm = 0.5;
  int ns1 = 0, nf1 = 0, ns2 = 0, nf2 = 0;
  int fs1 = 0, ff1 = 0, fs2 = 0, ff2 = 0;
  std::vector<double> cr_rec, df_rec;
  int gen = 0;
};

inline double reflect(double v, double lo, double hi) {
  // one reflection per side is enough for DE step sizes; clamp as a backstop
  if (v < lo) v = lo + (lo - v);
  if (v > hi) v = hi - (v - hi);
  return std::clamp(v, lo, hi);
}

}  // namespace detail

/// Minimizes the problem by round-robin coevolution: one DE generation per
/// subcomponent per cycle against a shared context vector, with immediate
/// context write-back on improvement. Only whole cycles are run, so the
/// evaluation count is exactly 1 + pop_size * subcomponents * (1 + cycles).
/// The trace logs every context improvement plus (fe, best) samples at the
/// requested checkpoints; checkpoints beyond the final evaluation count
/// repeat the final best.
inline CcResult cc_optimize(const ObjectiveProblem& p, const GroupList& subcomponents,
                            std::int64_t budget, std::uint64_t seed,
                            const std::vector<std::int64_t>& checkpoints = {},
                            const SansdeConfig& cfg = {},
                            const Vec* initial_context = nullptr) {
  const std::int64_t base = p.fe().total();
  auto used = [&] { return p.fe().total() - base; };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss01(0.0, 1.0);
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  CcResult res;
  res.best = initial_context ? *initial_context : p.midpoint();
  std::vector<std::int64_t> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  std::size_t next_cp = 0;
  auto record = [&] {
    while (next_cp < cps.size() && used() >= cps[next_cp]) {
      res.trace.emplace_back(cps[next_cp], res.best_fitness);
      res.checkpoint_trace.emplace_back(cps[next_cp], res.best_fitness);
      ++next_cp;
    }
  };
  auto improve = [&](double f) {
    res.best_fitness = f;
    record();  // flush any checkpoints passed since the last improvement
    res.trace.emplace_back(used(), f);
  };
  auto finish = [&] {
    record();
    while (next_cp < cps.size()) {
      res.trace.emplace_back(cps[next_cp], res.best_fitness);
      res.checkpoint_trace.emplace_back(cps[next_cp], res.best_fitness);
      ++next_cp;
    }
    return res;
  };

  if (budget < 1) return res;
  improve(evaluate(p, res.best, Stage::optimization));

  // population setup: individual 0 starts at the context slice
  std::vector<detail::SubState> subs;
  for (const auto& vars : subcomponents) {
    detail::SubState s;
    s.vars = vars;
    s.pop.assign(cfg.pop_size, Vec(vars.size()));
    s.fit.assign(cfg.pop_size, std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < cfg.pop_size; ++k)
      for (std::size_t j = 0; j < vars.size(); ++j) {
        const std::size_t v = vars[j];
        s.pop[k][j] = k == 0 ? res.best[v]
                             : p.lower()[v] + unif(rng) * p.range(v);
      }
    subs.push_back(std::move(s));
  }

  Vec trial_full = res.best;
  auto eval_member = [&](detail::SubState& s, const Vec& member) {
    for (std::size_t j = 0; j < s.vars.size(); ++j) trial_full[s.vars[j]] = member[j];
    const double f = evaluate(p, trial_full, Stage::optimization);
    for (std::size_t j = 0; j < s.vars.size(); ++j) trial_full[s.vars[j]] = res.best[s.vars[j]];
    return f;
  };

  // one whole cycle (one generation per subcomponent) costs this many FEs
  const std::int64_t cycle_cost = std::int64_t(cfg.pop_size) * std::int64_t(subs.size());

  // initial populations, one full generation of evaluations per subcomponent
  if (used() + cycle_cost > budget) return finish();
  for (auto& s : subs) {
    for (std::size_t k = 0; k < cfg.pop_size; ++k) {
      s.fit[k] = eval_member(s, s.pop[k]);
      if (s.fit[k] < res.best_fitness) {
        for (std::size_t j = 0; j < s.vars.size(); ++j) res.best[s.vars[j]] = s.pop[k][j];
        for (std::size_t j = 0; j < s.vars.size(); ++j) trial_full[s.vars[j]] = s.pop[k][j];
        improve(s.fit[k]);
      }
    }
    record();
  }

  auto generation = [&](detail::SubState& s) {
    const std::size_t np = cfg.pop_size, dim = s.vars.size();
    std::size_t ibest = 0;
    for (std::size_t k = 1; k < np; ++k)
      if (s.fit[k] < s.fit[ibest]) ibest = k;
    std::uniform_int_distribution<std::size_t> pick(0, np - 1);
    Vec trial(dim);
    for (std::size_t k = 0; k < np; ++k) {
      std::size_t r1 = pick(rng), r2 = pick(rng), r3 = pick(rng);
      while (r1 == k) r1 = pick(rng);
      while (r2 == k || r2 == r1) r2 = pick(rng);
      while (r3 == k || r3 == r1 || r3 == r2) r3 = pick(rng);

      const bool use_rand1 = unif(rng) < s.strat_prob;
      const bool use_gauss = unif(rng) < s.scale_prob;
      double F = use_gauss ? 0.5 + 0.3 * gauss01(rng) : cauchy(rng);
      F = std::clamp(std::fabs(F), 1e-4, 2.0);
      const double cr = std::clamp(s.crm + 0.1 * gauss01(rng), 0.0, 1.0);

      std::uniform_int_distribution<std::size_t> jpick(0, dim - 1);
      const std::size_t jrand = jpick(rng);
      for (std::size_t j = 0; j < dim; ++j) {
        double v;
        if (j == jrand || unif(rng) < cr) {
          v = use_rand1 ? s.pop[r1][j] + F * (s.pop[r2][j] - s.pop[r3][j])
                        : s.pop[k][j] + F * (s.pop[ibest][j] - s.pop[k][j]) +
                              F * (s.pop[r1][j] - s.pop[r2][j]);
          const std::size_t var = s.vars[j];
          v = detail::reflect(v, p.lower()[var], p.upper()[var]);
        } else {
          v = s.pop[k][j];
        }
        trial[j] = v;
      }

      const double f = eval_member(s, trial);
      const bool success = f < s.fit[k];
      (use_rand1 ? (success ? s.ns1 : s.nf1) : (success ? s.ns2 : s.nf2))++;
      (use_gauss ? (success ? s.fs1 : s.ff1) : (success ? s.fs2 : s.ff2))++;
      if (success) {
        s.cr_rec.push_back(cr);
        s.df_rec.push_back(s.fit[k] - f);
        s.fit[k] = f;
        s.pop[k] = trial;
        if (f < s.fit[ibest]) ibest = k;
        if (f < res.best_fitness) {
          for (std::size_t j = 0; j < dim; ++j) res.best[s.vars[j]] = trial[j];
          for (std::size_t j = 0; j < dim; ++j) trial_full[s.vars[j]] = trial[j];
          improve(f);
        }
      }
    }

    ++s.gen;
    if (s.gen % cfg.learning_period == 0) {
      const double a = double(s.ns1) * (s.ns2 + s.nf2);
      const double b = double(s.ns2) * (s.ns1 + s.nf1);
      if (a + b > 0) s.strat_prob = std::clamp(a / (a + b), 0.05, 0.95);
      const double c = double(s.fs1) * (s.fs2 + s.ff2);
      const double d = double(s.fs2) * (s.fs1 + s.ff1);
      if (c + d > 0) s.scale_prob = std::clamp(c / (c + d), 0.05, 0.95);
      s.ns1 = s.nf1 = s.ns2 = s.nf2 = 0;
      s.fs1 = s.ff1 = s.fs2 = s.ff2 = 0;
    }
    if (s.gen % cfg.crm_period == 0 && !s.cr_rec.empty()) {
      double wsum = 0, num = 0;
      for (std::size_t t = 0; t < s.cr_rec.size(); ++t) {
        wsum += s.df_rec[t];
        num += s.df_rec[t] * s.cr_rec[t];
      }
      if (wsum > 0) s.crm = num / wsum;
      s.cr_rec.clear();
      s.df_rec.clear();
    }
  };

  // whole cycles only, so the optimization-stage ledger ends at exactly
  // 1 + pop_size * subcomponents * (1 + cycles)
  while (used() + cycle_cost <= budget) {
    for (auto& s : subs) {
      generation(s);
      record();
    }
  }
  return finish();
}

/// Uniform random partition into groups of at most `cap` variables; the
/// control arm for decomposition-quality comparisons.
inline GroupList random_grouping(std::size_t n, std::size_t cap, std::uint64_t seed) {
  IndexSet order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  GroupList out;
  for (std::size_t b = 0; b < n; b += cap)
    out.emplace_back(order.begin() + b, order.begin() + std::min(b + cap, n));
  for (auto& g : out) std::sort(g.begin(), g.end());
  return out;
}

}  // namespace csg
