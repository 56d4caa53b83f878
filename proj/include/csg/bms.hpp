#pragma once
// BMS benchmark family: fifteen functions built from shifted, permuted and
// (for the non-separable blocks) rotated basis functions, each instance
// carrying its ground-truth grouping.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "csg/problem.hpp"

namespace csg::bms {

enum class SeparabilityClass { additive, multiplicative, composite, nonseparable };

// ---------------------------------------------------------------------------
// Basis functions. All operate on an already shifted slice z.
//
// The two product bases raise each factor to a dimension-normalized exponent
// 4/k (k = slice length). The factorization into per-variable factors is
// unchanged, so multiplicative separability is preserved exactly, while the
// product stays within double range for slices of any length.

inline double sphe(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

inline double elli(std::span<const double> z) {
  const std::size_t k = z.size();
  if (k == 1) return z[0] * z[0];
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    s += std::pow(10.0, 6.0 * double(i) / double(k - 1)) * z[i] * z[i];
  return s;
}

inline double rast(std::span<const double> z) {
  double s = 0.0;
  for (double v : z)
    s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v) + 10.0;
  return s;
}

inline double rosen(std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i] * z[i] - z[i + 1];
    const double b = z[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

// Schwefel 1.2
inline double schw(std::span<const double> z) {
  double s = 0.0, c = 0.0;
  for (double v : z) {
    c += v;
    s += c * c;
  }
  return s;
}

inline double prodsqu(std::span<const double> z) {
  const double e = 4.0 / double(z.size());
  double p = 1.0;
  for (double v : z) p *= std::pow(1.0 + v * v, e);
  return p;
}

inline double prodras(std::span<const double> z) {
  const double e = 4.0 / double(z.size());
  double p = 1.0;
  for (double v : z)
    p *= std::pow(1.0 + v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v) + 10.0, e);
  return p;
}

inline double logabs(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += std::fabs(v);
  return std::log(1.0 + s);
}

inline double cone(std::span<const double> z) { return std::sqrt(sphe(z)); }

struct BasisFunction {
  std::string name;
  SeparabilityClass separability_class;
  std::function<double(std::span<const double>)> fn;
};

inline BasisFunction make_basis(const std::string& name) {
  using C = SeparabilityClass;
  if (name == "sphe") return {name, C::additive, sphe};
  if (name == "elli") return {name, C::additive, elli};
  if (name == "rast") return {name, C::additive, rast};
  if (name == "rosen") return {name, C::nonseparable, rosen};
  if (name == "schw") return {name, C::nonseparable, schw};
  if (name == "prodsqu") return {name, C::multiplicative, prodsqu};
  if (name == "prodras") return {name, C::multiplicative, prodras};
  if (name == "logabs") return {name, C::composite, logabs};
  if (name == "cone") return {name, C::composite, cone};
  throw std::invalid_argument("unknown basis: " + name);
}

// ---------------------------------------------------------------------------
// Orthogonal rotation blocks.

using Matrix = std::vector<Vec>;

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian sample.
/// Deterministic per (size, seed).
inline Matrix random_rotation(std::size_t size, std::uint64_t seed) {
  if (size == 0) throw std::invalid_argument("rotation size must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix q(size, Vec(size));
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) q[i][j] = gauss(rng);
    for (std::size_t k = 0; k < i; ++k) {
      double dot = 0.0;
      for (std::size_t j = 0; j < size; ++j) dot += q[i][j] * q[k][j];
      for (std::size_t j = 0; j < size; ++j) q[i][j] -= dot * q[k][j];
    }
    double norm = 0.0;
    for (double v : q[i]) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12) return random_rotation(size, seed + 0x9e3779b97f4a7c15ull);
    for (double& v : q[i]) v /= norm;
  }
  return q;
}

inline double rot_rast(const Matrix& q, std::span<const double> z) {
  const std::size_t m = q.size();
  Vec y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) y[i] += q[i][j] * z[j];
  return rast(y);
}

// ---------------------------------------------------------------------------
// Instances.

struct BmsInstance {
  int function_id = 0;
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
  Vec shift;                       // o
  IndexSet permutation;            // P: slice position -> variable index
  std::vector<Matrix> rotation_blocks;
  GroupingResult ground_truth;
  std::shared_ptr<ObjectiveProblem> problem;
};

namespace detail {

struct Slice {
  BasisFunction basis;
  IndexSet vars;                   // original variable indices
  int rotation_index = -1;         // into the instance's rotation blocks
  bool in_sqrt = false;            // f14 outer sqrt over the block sum
  bool in_log = false;             // f15 outer log over the block sum
};

inline IndexSet take(const IndexSet& perm, std::size_t begin, std::size_t count) {
  return IndexSet(perm.begin() + begin, perm.begin() + begin + count);
}

}  // namespace detail

/// Builds a deterministic BMS instance. Block size for the non-separable
/// subcomponents of f12-f15 is 50 at D >= 1000 and D/20 below, keeping five
/// blocks in the quarter either way.
inline BmsInstance build_bms(int function_id, std::size_t dimension, std::uint64_t seed) {
  if (function_id < 1 || function_id > 15)
    throw std::invalid_argument("function_id must be in 1..15");
  if (dimension == 0 || dimension % 20 != 0)
    throw std::invalid_argument("dimension must be a positive multiple of 20");
  if (function_id >= 12 && dimension < 40)
    throw std::invalid_argument("block functions (f12-f15) need dimension >= 40");
  if (function_id >= 12 && dimension >= 1000 && (dimension / 4) % 50 != 0)
    throw std::invalid_argument("block functions need the quarter divisible by the block size");

  const std::size_t n = dimension;
  std::mt19937_64 rng(seed * 0x100000001b3ull + std::uint64_t(function_id));

  BmsInstance inst;
  inst.function_id = function_id;
  inst.dimension = n;
  inst.seed = seed;

  Vec lb(n, -5.0), ub(n, 5.0);
  inst.shift.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // middle half of the box keeps optima interior
    std::uniform_real_distribution<double> u(lb[i] + 0.25 * (ub[i] - lb[i]),
                                             ub[i] - 0.25 * (ub[i] - lb[i]));
    inst.shift[i] = u(rng);
  }

  inst.permutation.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.permutation[i] = i;
  std::shuffle(inst.permutation.begin(), inst.permutation.end(), rng);

  const std::size_t m = (n >= 1000) ? 50 : n / 20;  // rotation/non-sep block size
  auto slices = std::make_shared<std::vector<detail::Slice>>();
  auto rotations = std::make_shared<std::vector<Matrix>>();

  auto add = [&](const std::string& basis, std::size_t begin, std::size_t count) {
    slices->push_back({make_basis(basis), detail::take(inst.permutation, begin, count)});
  };
  auto add_blocks = [&](const std::string& basis, std::size_t begin, std::size_t count,
                        bool rotated, bool in_sqrt, bool in_log) {
    for (std::size_t b = 0; b * m < count; ++b) {
      detail::Slice s{make_basis(basis), detail::take(inst.permutation, begin + b * m, m),
                      -1, in_sqrt, in_log};
      if (rotated) {
        const std::uint64_t rseed =
            seed * 0x9e3779b97f4a7c15ull + (std::uint64_t(function_id) << 16) + b + 1;
        s.rotation_index = int(rotations->size());
        rotations->push_back(random_rotation(m, rseed));
      }
      slices->push_back(std::move(s));
    }
  };

  const std::size_t h = n / 2, q = n / 4, t10 = n / 10;
  switch (function_id) {
    case 1: add("rast", 0, h); add("prodras", h, h); break;
    case 2: add("sphe", 0, h); add("prodsqu", h, h); break;
    case 3: add("rast", 0, h); add("logabs", h, h); break;
    case 4: add("sphe", 0, h); add("cone", h, h); break;
    case 5: add("prodsqu", 0, h); add("logabs", h, h); break;
    case 6: add("prodras", 0, h); add("cone", h, h); break;
    case 7: add("rast", 0, 4 * t10); add("prodsqu", 4 * t10, 3 * t10); add("logabs", 7 * t10, 3 * t10); break;
    case 8: add("elli", 0, 3 * t10); add("prodras", 3 * t10, 4 * t10); add("cone", 7 * t10, 3 * t10); break;
    case 9: add("sphe", 0, 3 * t10); add("prodras", 3 * t10, 3 * t10); add("logabs", 6 * t10, 4 * t10); break;
    case 10: add("sphe", 0, q); add("prodras", q, q); add("cone", 2 * q, q); add("rosen", 3 * q, q); break;
    case 11: add("rast", 0, q); add("prodsqu", q, q); add("logabs", 2 * q, q); add("schw", 3 * q, q); break;
    case 12: add("rast", 0, q); add("prodsqu", q, q); add("logabs", 2 * q, q);
             add_blocks("rast", 3 * q, q, true, false, false); break;
    case 13: add("rast", 0, q); add("prodsqu", q, q); add("logabs", 2 * q, q);
             add_blocks("schw", 3 * q, q, false, false, false); break;
    case 14: add("sphe", 0, q); add("prodras", q, q); add("cone", 2 * q, q);
             add_blocks("rast", 3 * q, q, true, true, false); break;
    case 15: add("rast", 0, q); add("prodsqu", q, q); add("logabs", 2 * q, q);
             add_blocks("schw", 3 * q, q, false, false, true); break;
  }

  inst.rotation_blocks = *rotations;

  // ground truth from slice classes
  auto& gt = inst.ground_truth;
  for (const auto& s : *slices) {
    IndexSet vars = s.vars;
    std::sort(vars.begin(), vars.end());
    const bool is_block = s.in_sqrt || s.in_log || s.rotation_index >= 0 ||
                          s.basis.separability_class == SeparabilityClass::nonseparable;
    if (is_block) {
      gt.nonseparable_groups.push_back(vars);
      continue;
    }
    IndexSet* dst = nullptr;
    switch (s.basis.separability_class) {
      case SeparabilityClass::additive: dst = &gt.additively_separable; break;
      case SeparabilityClass::multiplicative: dst = &gt.multiplicatively_separable; break;
      case SeparabilityClass::composite: dst = &gt.generally_separable; break;
      default: break;
    }
    dst->insert(dst->end(), vars.begin(), vars.end());
  }
  std::sort(gt.additively_separable.begin(), gt.additively_separable.end());
  std::sort(gt.multiplicatively_separable.begin(), gt.multiplicatively_separable.end());
  std::sort(gt.generally_separable.begin(), gt.generally_separable.end());
  std::sort(gt.nonseparable_groups.begin(), gt.nonseparable_groups.end(),
            [](const IndexSet& a, const IndexSet& b) { return a.front() < b.front(); });

  const Vec shift = inst.shift;
  const bool sqrt_outer = (function_id == 14);
  const bool log_outer = (function_id == 15);
  auto objective = [slices, rotations, shift, sqrt_outer, log_outer](const Vec& x) {
    double total = 0.0, block_sum = 0.0;
    Vec z;
    for (const auto& s : *slices) {
      z.resize(s.vars.size());
      for (std::size_t j = 0; j < s.vars.size(); ++j)
        z[j] = x[s.vars[j]] - shift[s.vars[j]];
      double v = s.rotation_index >= 0 ? rot_rast((*rotations)[s.rotation_index], z)
                                       : s.basis.fn(z);
      if (s.in_sqrt || s.in_log)
        block_sum += v;
      else
        total += v;
    }
    if (sqrt_outer) total += std::sqrt(block_sum);
    if (log_outer) total += std::log(1.0 + block_sum);
    return total;
  };

  inst.problem = std::make_shared<ObjectiveProblem>(std::move(lb), std::move(ub), objective);
  return inst;
}

/// The 7-D worked example f(x) = x1 + x2*x3 + sqrt(x4+x5) + (x6-x7-1)^2.
/// Bounds for x2..x5 are positive so the product term is sign-constant and
/// the square root stays defined.
inline std::pair<std::shared_ptr<ObjectiveProblem>, GroupingResult> fig1_example() {
  Vec lb{-5.0, 0.5, 0.5, 0.5, 0.5, -5.0, -5.0};
  Vec ub{5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0};
  auto fn = [](const Vec& x) {
    const double d = x[5] - x[6] - 1.0;
    return x[0] + x[1] * x[2] + std::sqrt(x[3] + x[4]) + d * d;
  };
  GroupingResult truth;
  truth.additively_separable = {0};
  truth.multiplicatively_separable = {1, 2};
  truth.generally_separable = {3, 4};
  truth.nonseparable_groups = {{5, 6}};
  return {std::make_shared<ObjectiveProblem>(std::move(lb), std::move(ub), fn), truth};
}

}  // namespace csg::bms
