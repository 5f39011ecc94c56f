#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ampd/baselines.hpp"
#include "ampd/diagnostics.hpp"
#include "ampd/flow.hpp"
#include "ampd/problem.hpp"
#include "ampd/rng.hpp"
#include "ampd/solver.hpp"

namespace ampd {

/// Shortest round-trip text for a double ("nan", "inf", "-inf" for nonfinite).
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trace_csv_header(Eigen::Index m) {
  std::string h = "k,alpha,theta,gamma,feas,kkt,gap_est,gap_stale,wall_time";
  for (Eigen::Index j = 1; j <= m; ++j) h += ",f_" + std::to_string(j);
  return h;
}

inline void write_trace_csv(std::ostream& os, const Trace& trace, Eigen::Index m) {
  os << trace_csv_header(m) << '\n';
  for (const auto& r : trace) {
    os << r.k << ',' << format_number(r.alpha) << ',' << format_number(r.theta) << ',' << format_number(r.gamma)
       << ',' << format_number(r.feas) << ',' << format_number(r.kkt) << ',' << format_number(r.gap_est) << ','
       << (r.gap_stale ? 1 : 0) << ',' << format_number(r.wall_time);
    for (Eigen::Index j = 0; j < r.f_values.size(); ++j) os << ',' << format_number(r.f_values[j]);
    os << '\n';
  }
}

/// Result summary of one solve. States with n > 8 report only ||x||.
inline nlohmann::json solve_result_json(const Problem& p, const SolveResult& res) {
  nlohmann::json j;
  j["problem"] = p.name();
  j["converged"] = res.converged;
  j["iters"] = res.state.k;
  j["final_kkt"] = res.final_kkt;
  j["final_feas"] = res.final_feas;
  if (p.n() <= 8) {
    j["final_x"] = std::vector<double>(res.state.x.data(), res.state.x.data() + res.state.x.size());
  } else {
    j["final_x_norm"] = res.state.x.norm();
  }
  return j;
}

inline void write_reference_csv(std::ostream& os, const ParetoReference& ref, Eigen::Index n, Eigen::Index m) {
  for (Eigen::Index i = 1; i <= n; ++i) os << (i > 1 ? "," : "") << "z_" << i;
  for (Eigen::Index j = 1; j <= m; ++j) os << ",f_" << j;
  os << '\n';
  for (std::size_t k = 0; k < ref.points.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) os << (i > 0 ? "," : "") << format_number(ref.points[k][i]);
    for (Eigen::Index j = 0; j < m; ++j) os << ',' << format_number(ref.values[k][j]);
    os << '\n';
  }
}

/// `t,feas,lyapunov,x_1..x_n`; states with n > 8 get a single x_norm column.
inline void write_flow_csv(std::ostream& os, const std::vector<FlowSample>& traj, Eigen::Index n) {
  os << "t,feas,lyapunov";
  if (n <= 8) {
    for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  } else {
    os << ",x_norm";
  }
  os << '\n';
  for (const auto& s : traj) {
    os << format_number(s.t) << ',' << format_number(s.feas) << ',' << format_number(s.lyapunov);
    if (n <= 8) {
      for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_number(s.state.x[i]);
    } else {
      os << ',' << format_number(s.state.x.norm());
    }
    os << '\n';
  }
}

enum class BenchSolver { ampd, alamo };

inline const char* to_string(BenchSolver s) { return s == BenchSolver::ampd ? "ampd" : "alamo"; }

struct BenchSummary {
  std::string problem;
  std::size_t n_samples = 0;
  double median_iters = 0.0;
  double mean_iters = 0.0;
  double mean_time = 0.0;
  double success_rate = 0.0;
  BenchSolver solver = BenchSolver::ampd;
};

inline nlohmann::json to_json(const BenchSummary& s) {
  return {{"problem", s.problem},         {"n_samples", s.n_samples}, {"median_iters", s.median_iters},
          {"mean_iters", s.mean_iters},   {"mean_time", s.mean_time}, {"success_rate", s.success_rate},
          {"solver", to_string(s.solver)}};
}

struct BenchOptions {
  SolverConfig ampd;
  AlamoParams alamo;
  unsigned threads = 1;
};

/// Start point of sample `index` for `problem`, uniform in its sample region.
inline Vector sample_start(const Problem& p, std::uint64_t seed, const std::string& stream, std::size_t index) {
  Rng rng = Rng(seed).split(stream).split(p.name()).split(static_cast<std::uint64_t>(index));
  return rng.uniform_vector(p.sample_lo(), p.sample_hi());
}

namespace detail {

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must be
// written by index so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Multi-start benchmark: one summary per problem. Runs that throw count as
/// failures; iteration statistics are over runs that returned.
inline std::vector<BenchSummary> run_benchmark(const std::vector<Problem>& suite, std::size_t n_samples,
                                               std::uint64_t seed, BenchSolver solver,
                                               const BenchOptions& opt = {}) {
  if (suite.empty()) throw PreconditionError("run_benchmark: empty suite");
  if (n_samples < 1) throw PreconditionError("run_benchmark: n_samples must be >= 1");
  std::vector<BenchSummary> out;
  for (const Problem& p : suite) {
    struct Run {
      bool ok = false;
      bool converged = false;
      double iters = 0.0;
      double time = 0.0;
    };
    std::vector<Run> runs(n_samples);
    detail::parallel_for(n_samples, opt.threads, [&](std::size_t i) {
      const Vector x0 = sample_start(p, seed, "bench", i);
      const auto t0 = std::chrono::steady_clock::now();
      Run run;
      try {
        if (solver == BenchSolver::ampd) {
          SolverConfig cfg = opt.ampd;
          cfg.record_trace = false;
          const SolveResult res = solve(p, x0, cfg);
          run.converged = res.converged;
          run.iters = static_cast<double>(res.state.k);
        } else {
          const AlamoResult res = alamo_solve(p, x0, opt.alamo);
          run.converged = res.converged;
          run.iters = static_cast<double>(res.total_inner);
        }
        run.ok = true;
      } catch (const Error&) {
        run.ok = false;
      }
      run.time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      runs[i] = run;
    });

    BenchSummary s;
    s.problem = p.name();
    s.n_samples = n_samples;
    s.solver = solver;
    std::vector<double> iters;
    double time = 0.0;
    std::size_t success = 0;
    for (const Run& r : runs) {
      time += r.time;
      if (r.converged) ++success;
      if (r.ok) iters.push_back(r.iters);
    }
    if (!iters.empty()) {
      std::sort(iters.begin(), iters.end());
      const std::size_t h = iters.size() / 2;
      s.median_iters = iters.size() % 2 == 1 ? iters[h] : 0.5 * (iters[h - 1] + iters[h]);
      double sum = 0.0;
      for (double v : iters) sum += v;
      s.mean_iters = sum / static_cast<double>(iters.size());
    }
    s.mean_time = time / static_cast<double>(n_samples);
    s.success_rate = static_cast<double>(success) / static_cast<double>(n_samples);
    out.push_back(std::move(s));
  }
  return out;
}

struct FrontRow {
  Vector x;
  Vector f;
  double feas = 0.0;
  bool converged = false;
};

struct FrontResult {
  std::vector<FrontRow> rows;
  std::size_t skipped = 0;  ///< starts whose solve threw
};

/// Terminal objective values of AMPD-QP from `n_starts` random starts,
/// each capped at `max_iter` iterations.
inline FrontResult export_front(const Problem& p, std::size_t n_starts, long max_iter, std::uint64_t seed,
                                SolverConfig cfg = {}) {
  if (n_starts < 1) throw PreconditionError("export_front: n_starts must be >= 1");
  cfg.max_iter = max_iter;
  cfg.record_trace = false;
  FrontResult out;
  for (std::size_t i = 0; i < n_starts; ++i) {
    const Vector x0 = sample_start(p, seed, "front", i);
    try {
      const SolveResult res = solve(p, x0, cfg);
      out.rows.push_back(FrontRow{res.state.x, eval_objectives(p, res.state.x), res.final_feas, res.converged});
    } catch (const Error&) {
      ++out.skipped;
    }
  }
  return out;
}

inline void write_front_csv(std::ostream& os, const FrontResult& front, Eigen::Index m) {
  for (Eigen::Index j = 1; j <= m; ++j) os << (j > 1 ? "," : "") << "f_" << j;
  os << ",feas\n";
  for (const auto& row : front.rows) {
    for (Eigen::Index j = 0; j < m; ++j) os << (j > 0 ? "," : "") << format_number(row.f[j]);
    os << ',' << format_number(row.feas) << '\n';
  }
}

}  // namespace ampd
