#pragma once
// Composite separability grouping: staged detection of additively,
// multiplicatively and generally separable variables, followed by recursive
// grouping of the non-separable remainder.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "csg/problem.hpp"

namespace csg {

struct CsgConfig {
  double alpha = 1e-4;                  // initial probe step = alpha * range
  std::optional<double> eps_gss;        // absolute line-search precision; default alpha/2 * range
  double halving_factor = 0.5;
  double eps2_scale = 10.0;             // relative guard on the log-domain threshold
  double eps2_floor = 1e-10;
  std::size_t scan_points = 101;        // first-level grid of the per-variable line search
  std::size_t grid_points = 21;         // grid of each zoom refinement level
  // Partner placements for the shift tests, as fractions of the box. One
  // corner alone can leave a bound-clamped conditional minimum clamped in
  // every probe and hide the interaction; the interior levels close that gap.
  std::vector<double> probe_levels{1.0, 0.0, 0.5, 0.25, 0.75};
  bool random_nvg_seed = false;         // default: lowest remaining index seeds the first group
  std::uint64_t nvg_seed = 0;

  // The probe step must dominate twice the line-search position error, or a
  // separable variable's own residual offset would register as a shift.
  double gss_eps(const ObjectiveProblem& p, std::size_t i) const {
    return eps_gss ? *eps_gss : 0.5 * alpha * p.range(i);
  }
  double delta0(const ObjectiveProblem& p, std::size_t i) const {
    return alpha * p.range(i);
  }
};

/// Rolling context vector plus the per-variable snapshot taken when each
/// variable's independent minimum was found. Rows of variables classified in
/// S1/S2 stay at the midpoint initialization.
struct ContextArchive {
  Vec cv;
  std::vector<Vec> rows;

  explicit ContextArchive(const ObjectiveProblem& p)
      : cv(p.midpoint()), rows(p.dimension(), p.midpoint()) {}
};

// ---------------------------------------------------------------------------
// Thresholds. eps1 follows the RDG2 rounding-error model; eps2 adds a
// relative-plus-floor guard suited to log-domain magnitudes.

inline double gamma_coeff(std::size_t n) {
  const double u = std::numeric_limits<double>::epsilon() / 2.0;
  const double k = std::sqrt(double(n)) + 2.0;
  return k * u / (1.0 - k * u);
}

inline double eps1_threshold(std::size_t n, double f_ll, double f_ul, double f_lu, double f_uu) {
  return gamma_coeff(n) *
         (std::fabs(f_ll) + std::fabs(f_ul) + std::fabs(f_lu) + std::fabs(f_uu));
}

/// `amplification` is the first-order error multiplier of the log-domain
/// differences: the extracted values F are differences of near-equal fitness
/// values, so the rounding error of ln|F| is about gamma * (|f| + |f'|)/|F|
/// per corner, far above gamma itself when the subtraction cancels.
inline double eps2_threshold(const CsgConfig& cfg, std::size_t n, double d1, double d2,
                             double amplification = 0.0) {
  return std::max(cfg.eps2_scale * gamma_coeff(n) *
                      (std::fabs(d1) + std::fabs(d2) + 1.0 + amplification),
                  cfg.eps2_floor);
}

// ---------------------------------------------------------------------------
// Stage 1: additive finite-difference check.

/// Corner values for one variable: subscript 1 is coordinate i, subscript 2
/// the remaining coordinates (l = lower corner, u = upper corner).
struct CornerProbes {
  double f_ll = 0, f_lu = 0, f_ul = 0, f_uu = 0;
};

/// Evaluates the two mixed corners for variable i (two FEs; the pure corners
/// are cached by the caller) and returns beta1 = |Delta1 - Delta2|.
inline double additive_check(const ObjectiveProblem& p, std::size_t i, double f_ll, double f_uu,
                             CornerProbes* probes = nullptr) {
  const std::size_t n = p.dimension();
  Vec x_lu = p.upper();
  x_lu[i] = p.lower()[i];
  Vec x_ul = p.lower();
  x_ul[i] = p.upper()[i];
  const double f_lu = evaluate(p, x_lu, Stage::additive);
  const double f_ul = evaluate(p, x_ul, Stage::additive);
  if (!std::isfinite(f_lu) || !std::isfinite(f_ul)) throw NonFiniteObjective{};
  if (probes) *probes = {f_ll, f_lu, f_ul, f_uu};
  (void)n;
  const double d1 = f_ul - f_ll;
  const double d2 = f_uu - f_lu;
  return std::fabs(d1 - d2);
}

// ---------------------------------------------------------------------------
// Stage 2: multiplicatively separable variable detection.

/// Re-probes the four corners with coordinate i scaled by the halving factor
/// (four FEs), forms the extracted subfunction values F = f - f', and returns
/// beta2 = |Delta'1 - Delta'2|. A vanishing |F| means the subfunction ignores
/// the corner move; the variable is then declared not multiplicative
/// (beta2 = +inf) and left for the minimum-shift stage.
inline double msvd(const ObjectiveProblem& p, std::size_t i, const CornerProbes& c,
                   double halving_factor = 0.5, double* delta1 = nullptr,
                   double* delta2 = nullptr, double* amplification = nullptr) {
  double probe_sum = 0.0;
  auto probe = [&](bool i_at_upper, bool rest_at_upper) {
    Vec x = rest_at_upper ? p.upper() : p.lower();
    x[i] = (i_at_upper ? p.upper()[i] : p.lower()[i]) * halving_factor;
    const double v = evaluate(p, x, Stage::msvd);
    if (!std::isfinite(v)) throw NonFiniteObjective{};
    probe_sum += std::fabs(v);
    return v;
  };
  const double F_ll = c.f_ll - probe(false, false);
  const double F_ul = c.f_ul - probe(true, false);
  const double F_lu = c.f_lu - probe(false, true);
  const double F_uu = c.f_uu - probe(true, true);
  constexpr double floor = 1e-300;
  if (std::fabs(F_ll) < floor || std::fabs(F_ul) < floor || std::fabs(F_lu) < floor ||
      std::fabs(F_uu) < floor)
    return std::numeric_limits<double>::infinity();
  if (amplification) {
    const double mass = std::fabs(c.f_ll) + std::fabs(c.f_ul) + std::fabs(c.f_lu) +
                        std::fabs(c.f_uu) + probe_sum;
    const double smallest = std::min(std::min(std::fabs(F_ll), std::fabs(F_ul)),
                                     std::min(std::fabs(F_lu), std::fabs(F_uu)));
    *amplification = mass / smallest;
  }
  const double d1 = std::log(std::fabs(F_ll)) - std::log(std::fabs(F_ul));
  const double d2 = std::log(std::fabs(F_lu)) - std::log(std::fabs(F_uu));
  if (delta1) *delta1 = d1;
  if (delta2) *delta2 = d2;
  return std::fabs(d1 - d2);
}

// ---------------------------------------------------------------------------
// Stage 3 helper: golden-section search along one coordinate.

struct GssResult {
  double minimizer = 0;
  int iterations = 0;   // interval contractions; FEs = iterations + 2
};

/// Minimizes f along coordinate i with every other coordinate fixed by the
/// context. Terminates when the two interior samples are equal or the
/// bracket is narrower than eps; each iteration contracts the bracket by
/// (sqrt(5)-1)/2.
inline GssResult gss_minimize(const ObjectiveProblem& p, std::size_t i, Vec context,
                              double eps, Stage stage = Stage::gss) {
  constexpr double ratio = 0.6180339887498949;  // (sqrt(5)-1)/2
  double a = p.lower()[i], b = p.upper()[i];
  auto f_at = [&](double v) {
    context[i] = v;
    return evaluate(p, context, stage);
  };
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f_at(c), fd = f_at(d);
  GssResult r;
  while (b - a >= eps) {
    if (fc == fd) break;  // equal-sample termination
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f_at(d);
    }
    ++r.iterations;
  }
  r.minimizer = 0.5 * (a + b);
  return r;
}

/// Per-variable line search used by the pipeline: a dense scan followed by
/// grid zoom inside every candidate basin. An inaccurate archived minimum
/// poisons every later shift test, and two basins whose minima differ by
/// less than the scan's sampling error cannot be told apart from the raw
/// samples, so each sampled local minimum is refined before they compete.
inline double line_minimize(const ObjectiveProblem& p, std::size_t i, Vec context, double eps,
                            std::size_t scan_points, std::size_t grid_points,
                            Stage stage = Stage::gss) {
  const double lb = p.lower()[i], ub = p.upper()[i];
  const std::size_t pts = std::max<std::size_t>(scan_points, 5);
  const double step0 = (ub - lb) / double(pts - 1);
  Vec fv(pts);
  for (std::size_t k = 0; k < pts; ++k) {
    context[i] = lb + double(k) * step0;
    fv[k] = evaluate(p, context, stage);
  }
  std::vector<std::size_t> cand;
  for (std::size_t k = 0; k < pts; ++k) {
    const bool left_ok = k == 0 || fv[k] <= fv[k - 1];
    const bool right_ok = k + 1 == pts || fv[k] <= fv[k + 1];
    if (left_ok && right_ok) cand.push_back(k);
  }
  std::sort(cand.begin(), cand.end(),
            [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  if (cand.size() > 16) cand.resize(16);

  double best_v = lb + double(cand.front()) * step0, best_f = fv[cand.front()];
  for (std::size_t k : cand) {
    double lo = std::max(lb, lb + double(k) * step0 - step0);
    double hi = std::min(ub, lb + double(k) * step0 + step0);
    const std::size_t zp = std::max<std::size_t>(grid_points, 5);
    while (hi - lo >= eps) {
      const double step = (hi - lo) / double(zp - 1);
      double loc_v = lo, loc_f = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < zp; ++t) {
        const double v = lo + double(t) * step;
        context[i] = v;
        const double f = evaluate(p, context, stage);
        if (f < loc_f) {
          loc_f = f;
          loc_v = v;
        }
      }
      if (loc_f < best_f) {
        best_f = loc_f;
        best_v = loc_v;
      }
      lo = std::max(lb, loc_v - step);
      hi = std::min(ub, loc_v + step);
    }
  }
  return best_v;
}

// ---------------------------------------------------------------------------
// Minimum-shift probe shared by GSVD and RGD.

enum class ProbeOutcome {
  unchanged,  // f rose on both sides: the minimum did not shift
  shifted,    // f fell on at least one side
  flat,       // probes left the box while values were still equal
  mixed       // loop exited at the bounds with one side equal, other risen
};

/// Probes x_i +/- delta with delta growing tenfold until both sides have
/// left the box, and reports a shift as soon as any probe falls below f(x).
/// The sweep over scales matters: an interaction can move the conditional
/// minimum by less than one probe step (tiny shift, smallest delta sees it)
/// or past a ridge that hides it from small steps (largest delta sees it).
/// A side outside the box counts as risen -- the bound constrains the
/// minimum there, so only the in-box side is informative.
inline ProbeOutcome min_shift_probe(const ObjectiveProblem& p, std::size_t i, Vec x,
                                    double delta0, Stage stage) {
  const double fx = evaluate(p, x, stage);
  double delta = delta0;
  bool evaluated = false, rose_seen = false, last_equal = false;
  Vec probe = x;
  while (true) {
    const double xl = x[i] - delta, xr = x[i] + delta;
    const bool lok = xl >= p.lower()[i], rok = xr <= p.upper()[i];
    if (!lok && !rok) break;
    double fl = fx, fr = fx;
    if (lok) {
      probe[i] = xl;
      fl = evaluate(p, probe, stage);
    }
    if (rok) {
      probe[i] = xr;
      fr = evaluate(p, probe, stage);
    }
    evaluated = true;
    if (fl < fx || fr < fx) return ProbeOutcome::shifted;
    rose_seen = rose_seen || (lok && fl > fx) || (rok && fr > fx);
    last_equal = (lok && fl == fx) || (rok && fr == fx);
    delta *= 10.0;
  }
  if (!evaluated || !rose_seen) return ProbeOutcome::flat;
  return last_equal ? ProbeOutcome::mixed : ProbeOutcome::unchanged;
}

// ---------------------------------------------------------------------------
// Stage 3: generally separable variable detection.

namespace detail {

inline bool probe_kept_minimum(ProbeOutcome o) {
  return o == ProbeOutcome::unchanged || o == ProbeOutcome::flat;
}

}  // namespace detail

/// Classifies each variable of S by the minimum-shift principle: the
/// remaining unclassified variables are fixed at a probe level and the
/// variable's archived minimum is perturbed. The test sweeps every
/// configured level: a separable variable's minimizer is context-free and
/// survives all of them, while an interaction must move the conditional
/// minimum at some reachable partner placement. Variables found separable
/// stay removed from the working set; rejected variables return to it.
inline IndexSet gsvd(const ObjectiveProblem& p, const IndexSet& S, const ContextArchive& arc,
                     const CsgConfig& cfg) {
  IndexSet s3;
  std::vector<std::size_t> remaining(S.begin(), S.end());
  for (std::size_t idx = 0; idx < S.size(); ++idx) {
    const std::size_t i = S[idx];
    remaining.erase(std::find(remaining.begin(), remaining.end(), i));
    bool separable = true;
    for (const double level : cfg.probe_levels) {
      Vec x = arc.rows[i];
      for (std::size_t j : remaining) x[j] = p.lower()[j] + level * p.range(j);
      if (!detail::probe_kept_minimum(
              min_shift_probe(p, i, std::move(x), cfg.delta0(p, i), Stage::gsvd))) {
        separable = false;
        break;
      }
    }
    if (separable)
      s3.push_back(i);
    else
      remaining.push_back(i);
  }
  std::sort(s3.begin(), s3.end());
  return s3;
}

// ---------------------------------------------------------------------------
// Stage 4: non-separable variable grouping.

/// Recursive group detection: returns the subset of formed groups that
/// interact with variable xi, found by fixing whole group unions at a probe
/// level and halving the candidate list on a positive test. As in gsvd,
/// every level is tried so a bound-clamped conditional minimum cannot mask
/// the interaction.
inline GroupList rgd(const ObjectiveProblem& p, std::size_t xi, const GroupList& groups,
                     const ContextArchive& arc, const CsgConfig& cfg) {
  if (groups.empty()) return {};
  bool shifted = false;
  for (const double level : cfg.probe_levels) {
    Vec x = arc.rows[xi];
    for (const auto& g : groups)
      for (std::size_t j : g) x[j] = p.lower()[j] + level * p.range(j);
    if (min_shift_probe(p, xi, std::move(x), cfg.delta0(p, xi), Stage::nvg) ==
        ProbeOutcome::shifted) {
      shifted = true;
      break;
    }
  }
  if (!shifted) return {};
  if (groups.size() == 1) return groups;
  const std::size_t half = (groups.size() + 1) / 2;  // first half takes the ceiling
  GroupList left(groups.begin(), groups.begin() + half);
  GroupList right(groups.begin() + half, groups.end());
  GroupList out = rgd(p, xi, left, arc, cfg);
  GroupList r2 = rgd(p, xi, right, arc, cfg);
  out.insert(out.end(), r2.begin(), r2.end());
  return out;
}

/// Groups the non-separable variables: each variable either joins the single
/// interacting group, merges every interacting group into one, or seeds a
/// new group of its own.
inline GroupList nvg(const ObjectiveProblem& p, const IndexSet& V, const ContextArchive& arc,
                     const CsgConfig& cfg) {
  if (V.empty()) return {};
  IndexSet order(V.begin(), V.end());
  std::sort(order.begin(), order.end());
  if (cfg.random_nvg_seed) {
    std::mt19937_64 rng(cfg.nvg_seed);
    std::uniform_int_distribution<std::size_t> pick(0, order.size() - 1);
    std::swap(order[0], order[pick(rng)]);
  }
  GroupList groups{{order[0]}};
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t xi = order[k];
    const GroupList hits = rgd(p, xi, groups, arc, cfg);
    if (hits.empty()) {
      groups.push_back({xi});
      continue;
    }
    IndexSet merged;
    GroupList rest;
    for (const auto& g : groups) {
      const bool hit = std::find(hits.begin(), hits.end(), g) != hits.end();
      if (hit)
        merged.insert(merged.end(), g.begin(), g.end());
      else
        rest.push_back(g);
    }
    merged.push_back(xi);
    std::sort(merged.begin(), merged.end());
    rest.push_back(std::move(merged));
    groups = std::move(rest);
  }
  std::sort(groups.begin(), groups.end(),
            [](const IndexSet& a, const IndexSet& b) { return a.front() < b.front(); });
  return groups;
}

// ---------------------------------------------------------------------------
// The full pipeline.

/// Runs the four stages over the problem, scanning variables in reverse
/// index order. The pure corner evaluations are made once and reused for
/// every variable. Stage costs land on the problem's ledger.
inline GroupingResult csg_decompose(const ObjectiveProblem& p, const CsgConfig& cfg = {},
                                    ContextArchive* archive_out = nullptr) {
  const std::size_t n = p.dimension();
  GroupingResult out;
  ContextArchive arc(p);

  const double f_ll = evaluate(p, p.lower(), Stage::additive);
  const double f_uu = evaluate(p, p.upper(), Stage::additive);
  if (!std::isfinite(f_ll) || !std::isfinite(f_uu)) throw NonFiniteObjective{};

  IndexSet rest;
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t i = k;
    CornerProbes probes;
    const double beta1 = additive_check(p, i, f_ll, f_uu, &probes);
    if (beta1 < eps1_threshold(n, probes.f_ll, probes.f_ul, probes.f_lu, probes.f_uu)) {
      out.additively_separable.push_back(i);
      continue;
    }
    double d1 = 0, d2 = 0, amp = 0;
    const double beta2 = msvd(p, i, probes, cfg.halving_factor, &d1, &d2, &amp);
    if (beta2 < eps2_threshold(cfg, n, d1, d2, amp)) {
      out.multiplicatively_separable.push_back(i);
      continue;
    }
    arc.cv[i] = line_minimize(p, i, arc.cv, cfg.gss_eps(p, i), cfg.scan_points, cfg.grid_points);
    arc.rows[i] = arc.cv;
    rest.push_back(i);
  }

  std::sort(rest.begin(), rest.end());
  out.generally_separable = gsvd(p, rest, arc, cfg);
  IndexSet nonsep;
  std::set_difference(rest.begin(), rest.end(), out.generally_separable.begin(),
                      out.generally_separable.end(), std::back_inserter(nonsep));
  if (!nonsep.empty()) out.nonseparable_groups = nvg(p, nonsep, arc, cfg);

  std::sort(out.additively_separable.begin(), out.additively_separable.end());
  std::sort(out.multiplicatively_separable.begin(), out.multiplicatively_separable.end());
  if (archive_out) *archive_out = arc;
  return out;
}

}  // namespace csg
