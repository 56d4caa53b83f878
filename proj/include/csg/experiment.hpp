#pragma once
// Experiment driver: JSON manifest -> decomposition / optimization suites
// with deterministic CSV output.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "csg/baselines.hpp"
#include "csg/bms.hpp"
#include "csg/decompose.hpp"
#include "csg/metrics.hpp"
#include "csg/optimizer.hpp"

namespace csg {

struct ExperimentManifest {
  struct Problem {
    int function_id = 1;
    std::size_t dimension = 100;
    std::uint64_t seed = 1;
  };

  std::vector<Problem> problems;
  std::vector<std::string> methods{"csg"};
  CsgConfig decomposition_config;
  std::int64_t budget = 0;
  int runs = 1;
  std::vector<std::int64_t> checkpoints;
  std::string output_dir = ".";

  static ExperimentManifest from_json(const nlohmann::json& j) {
    ExperimentManifest m;
    for (const auto& pj : j.at("problems")) {
      Problem p;
      p.function_id = pj.at("function_id").get<int>();
      p.dimension = pj.at("dimension").get<std::size_t>();
      p.seed = pj.value("seed", std::uint64_t{1});
      m.problems.push_back(p);
    }
    if (j.contains("methods")) m.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("decomposition_config")) {
      const auto& c = j.at("decomposition_config");
      m.decomposition_config.alpha = c.value("alpha", m.decomposition_config.alpha);
      if (c.contains("eps_gss")) m.decomposition_config.eps_gss = c.at("eps_gss").get<double>();
      m.decomposition_config.halving_factor =
          c.value("halving_factor", m.decomposition_config.halving_factor);
    }
    if (j.contains("optimization")) {
      const auto& o = j.at("optimization");
      m.budget = o.value("budget", std::int64_t{0});
      m.runs = o.value("runs", 1);
      if (o.contains("checkpoints"))
        m.checkpoints = o.at("checkpoints").get<std::vector<std::int64_t>>();
    }
    m.output_dir = j.value("output_dir", std::string{"."});
    m.validate();
    return m;
  }

  void validate() const {
    if (problems.empty()) throw std::invalid_argument("manifest has no problems");
    if (methods.empty()) throw std::invalid_argument("manifest has an empty method list");
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      if (k > 0 && checkpoints[k] <= checkpoints[k - 1])
        throw std::invalid_argument("checkpoints must be strictly increasing");
      if (budget > 0 && checkpoints[k] > budget)
        throw std::invalid_argument("checkpoints must not exceed the budget");
    }
  }

  static ExperimentManifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

namespace detail {

inline std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

/// Runs `cells` jobs on up to `threads` workers; job order of completion is
/// irrelevant because each job writes only its own output slot.
inline void parallel_for(std::size_t cells, int threads, const std::function<void(std::size_t)>& job) {
  if (threads < 2 || cells < 2) {
    for (std::size_t i = 0; i < cells; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) job(i);
  };
  std::vector<std::thread> pool;
  const std::size_t nw = std::min<std::size_t>(std::size_t(threads), cells);
  for (std::size_t t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline GroupingResult run_decomposition_method(const std::string& method,
                                               const ObjectiveProblem& p,
                                               const CsgConfig& cfg) {
  if (method == "csg") return csg_decompose(p, cfg);
  if (method == "dg") return dg_pairwise(p).second;
  if (method == "rdg_like") return rdg_like_decompose(p);
  if (method == "ddg") return ddg_decompose(p);
  throw std::invalid_argument("unknown method: " + method);
}

struct SuiteReport {
  std::vector<std::string> rows;            // CSV body rows, deterministic order
  std::vector<std::string> aggregate_rows;  // optimization only: stats across runs
  nlohmann::json sidecar;                   // decomposition only: full groupings
  std::vector<std::string> errors;          // per-cell failures, cells kept out of rows
};

namespace detail {

inline nlohmann::json grouping_to_json(const GroupingResult& g) {
  return {{"additively_separable", g.additively_separable},
          {"multiplicatively_separable", g.multiplicatively_separable},
          {"generally_separable", g.generally_separable},
          {"nonseparable_groups", g.nonseparable_groups}};
}

}  // namespace detail

/// One row per (method, problem): accuracy against the instance's ground
/// truth plus the per-stage evaluation counts.
inline SuiteReport run_decomposition_suite(const ExperimentManifest& m, int threads = 1) {
  const std::size_t cells = m.methods.size() * m.problems.size();
  std::vector<std::string> rows(cells), errors(cells);
  std::vector<nlohmann::json> side(cells);

  detail::parallel_for(cells, threads, [&](std::size_t c) {
    const auto& method = m.methods[c / m.problems.size()];
    const auto& pr = m.problems[c % m.problems.size()];
    try {
      auto inst = bms::build_bms(pr.function_id, pr.dimension, pr.seed);
      const auto got = run_decomposition_method(method, *inst.problem, m.decomposition_config);
      const auto acc = score(truth_from(inst.ground_truth), got);
      const auto& fe = inst.problem->fe();
      std::ostringstream os;
      os << method << ',' << pr.function_id << ',' << pr.dimension << ',' << pr.seed << ','
         << detail::fmt_sci(acc.sa.value_or(std::nan(""))) << ','
         << detail::fmt_sci(acc.na.value_or(std::nan(""))) << ','
         << fe.additive_stage << ',' << fe.msvd_stage << ',' << fe.gss_stage << ','
         << fe.gsvd_stage << ',' << fe.nvg_stage << ',' << fe.total();
      rows[c] = os.str();
      side[c] = {{"method", method},
                 {"function_id", pr.function_id},
                 {"dimension", pr.dimension},
                 {"seed", pr.seed},
                 {"grouping", detail::grouping_to_json(got)}};
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << method << '/' << 'f' << pr.function_id << "/D" << pr.dimension << ": " << e.what();
      errors[c] = os.str();
    }
  });

  SuiteReport rep;
  rep.sidecar = nlohmann::json::array();
  for (std::size_t c = 0; c < cells; ++c) {
    if (!rows[c].empty()) rep.rows.push_back(rows[c]);
    if (!side[c].is_null()) rep.sidecar.push_back(side[c]);
    if (!errors[c].empty()) rep.errors.push_back(errors[c]);
  }
  return rep;
}

/// One row per (method, problem, run, checkpoint). The decomposition is run
/// once per (method, problem) and its evaluations are charged against the
/// optimization budget; checkpoints are absolute evaluation counts.
inline SuiteReport run_optimization_suite(const ExperimentManifest& m, int threads = 1) {
  const std::size_t cells = m.methods.size() * m.problems.size() * std::size_t(m.runs);
  std::vector<std::string> rows(cells), errors(cells);
  // per-cell best fitness at each checkpoint, for the cross-run aggregates
  std::vector<std::vector<double>> values(cells);

  detail::parallel_for(cells, threads, [&](std::size_t c) {
    const std::size_t per_method = m.problems.size() * std::size_t(m.runs);
    const auto& method = m.methods[c / per_method];
    const auto& pr = m.problems[(c % per_method) / std::size_t(m.runs)];
    const int run = int(c % std::size_t(m.runs));
    try {
      auto inst = bms::build_bms(pr.function_id, pr.dimension, pr.seed);
      const auto grouping =
          run_decomposition_method(method, *inst.problem, m.decomposition_config);
      const std::int64_t deco_fe = inst.problem->fe().total();
      if (deco_fe >= m.budget)
        throw std::runtime_error("decomposition spent the whole optimization budget");
      std::vector<std::int64_t> cps;
      for (auto cp : m.checkpoints) cps.push_back(std::max<std::int64_t>(cp - deco_fe, 0));
      const auto subs = partition_separables(grouping);
      const auto res = cc_optimize(*inst.problem, subs, m.budget - deco_fe,
                                   pr.seed * 1000003ull + std::uint64_t(run), cps);
      std::ostringstream os;
      for (std::size_t k = 0; k < res.checkpoint_trace.size(); ++k) {
        os << method << ',' << pr.function_id << ',' << pr.dimension << ',' << run << ','
           << m.checkpoints[k] << ',' << detail::fmt_sci(res.checkpoint_trace[k].second) << '\n';
        values[c].push_back(res.checkpoint_trace[k].second);
      }
      std::string s = os.str();
      if (!s.empty()) s.pop_back();
      rows[c] = s;
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << method << '/' << 'f' << pr.function_id << "/D" << pr.dimension << "/run" << run
         << ": " << e.what();
      errors[c] = os.str();
    }
  });

  SuiteReport rep;
  for (std::size_t c = 0; c < cells; ++c) {
    if (!rows[c].empty()) rep.rows.push_back(rows[c]);
    if (!errors[c].empty()) rep.errors.push_back(errors[c]);
  }

  // aggregate across runs: one row per (method, problem, checkpoint)
  for (std::size_t mm = 0; mm < m.methods.size(); ++mm) {
    for (std::size_t pp = 0; pp < m.problems.size(); ++pp) {
      const std::size_t base = mm * m.problems.size() * std::size_t(m.runs) +
                               pp * std::size_t(m.runs);
      for (std::size_t k = 0; k < m.checkpoints.size(); ++k) {
        std::vector<double> v;
        for (int run = 0; run < m.runs; ++run) {
          const auto& cell = values[base + std::size_t(run)];
          if (k < cell.size()) v.push_back(cell[k]);
        }
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        double mean = 0;
        for (double x : v) mean += x;
        mean /= double(v.size());
        const double median = v.size() % 2 ? v[v.size() / 2]
                                           : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(var / double(v.size() - 1)) : 0.0;
        std::ostringstream os;
        os << m.methods[mm] << ',' << m.problems[pp].function_id << ','
           << m.problems[pp].dimension << ',' << m.checkpoints[k] << ',' << v.size() << ','
           << detail::fmt_sci(mean) << ',' << detail::fmt_sci(median) << ','
           << detail::fmt_sci(sd);
        rep.aggregate_rows.push_back(os.str());
      }
    }
  }
  return rep;
}

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::string>& rows) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline constexpr const char* kDecompositionHeader =
    "method,function_id,dimension,seed,sa,na,fe_additive,fe_msvd,fe_gss,fe_gsvd,fe_nvg,fe_total";
inline constexpr const char* kOptimizationHeader =
    "method,function_id,dimension,run,checkpoint_fe,best_fitness";
inline constexpr const char* kOptimizationSummaryHeader =
    "method,function_id,dimension,checkpoint_fe,runs,mean,median,std";

}  // namespace csg
