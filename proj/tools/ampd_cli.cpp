// ampd_cli: solve, benchmark, front export and flow integration.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ampd/ampd.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ampd::Problem load_problem(const std::string& name, std::uint64_t seed) {
  if (name.rfind("json:", 0) == 0) return ampd::load_quadratic_problem(name.substr(5));
  try {
    return ampd::make_named_problem(name, seed);
  } catch (const ampd::UnknownProblemError&) {
    throw UsageError("unknown problem '" + name + "'");
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ampd::Vector read_x0(const std::string& path, Eigen::Index n) {
  std::ifstream in(path);
  if (!in) throw ampd::Error("cannot open x0 file '" + path + "'");
  std::vector<double> vals;
  std::string tok;
  while (in >> std::ws && std::getline(in, tok, ',')) {
    std::stringstream line(tok);
    double v;
    while (line >> v) vals.push_back(v);
  }
  if (static_cast<Eigen::Index>(vals.size()) != n)
    throw UsageError("x0 file has " + std::to_string(vals.size()) + " values, expected " + std::to_string(n));
  return Eigen::Map<ampd::Vector>(vals.data(), n);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ampd::Error("cannot write '" + path + "'");
  return out;
}

// Anchor for the flow Lyapunov function: exact KKT pair for quadratic
// models, otherwise the feasible point (or least-norm feasible point) with xi = 0.
std::pair<ampd::Vector, ampd::Vector> flow_anchor(const ampd::Problem& p) {
  if (p.quadratic()) {
    const ampd::Vector lambda = ampd::Vector::Constant(p.m(), 1.0 / static_cast<double>(p.m()));
    auto kkt = ampd::quadratic_kkt_pair(p, lambda);
    return {kkt.x, kkt.xi};
  }
  const auto& c = p.constraint();
  ampd::Vector x = p.feasible_point() ? *p.feasible_point() : ampd::project_affine(c.matrix(), c.rhs(), ampd::Vector::Zero(p.n()));
  return {x, ampd::Vector::Zero(p.r())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated multiobjective primal-dual solver"};
  app.require_subcommand(1);

  std::string problem;
  std::uint64_t seed = 0;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem from one start");
  std::string x0_arg = "auto", trace_path, result_path;
  ampd::SolverConfig scfg;
  solve_cmd->add_option("--problem", problem, "Problem name or json:PATH")->required();
  solve_cmd->add_option("--seed", seed, "Seed for random data and start point");
  solve_cmd->add_option("--x0", x0_arg, "CSV file with the start point, or 'auto'");
  solve_cmd->add_option("--tol", scfg.tol, "KKT tolerance")->default_val(1e-3);
  solve_cmd->add_option("--max-iter", scfg.max_iter, "Iteration cap")->default_val(100000);
  solve_cmd->add_option("--gamma0", scfg.gamma0, "Initial gamma")->default_val(1.0);
  solve_cmd->add_option("--theta0", scfg.theta0, "Initial theta")->default_val(1.0);
  solve_cmd->add_option("--trace", trace_path, "Trace CSV output");
  solve_cmd->add_option("--result", result_path, "Result JSON output (stdout if omitted)");

  auto* bench_cmd = app.add_subcommand("bench", "Multi-start benchmark");
  std::string suite, out_path, solver_name = "ampd";
  std::size_t samples = 100;
  unsigned threads = 1;
  bench_cmd->add_option("--suite", suite, "Comma-separated problem names")->required();
  bench_cmd->add_option("--samples", samples, "Starts per problem")->default_val(100);
  bench_cmd->add_option("--seed", seed, "Seed");
  bench_cmd->add_option("--solver", solver_name, "ampd or alamo")->check(CLI::IsMember({"ampd", "alamo"}));
  bench_cmd->add_option("--threads", threads, "Worker threads")->default_val(1);
  bench_cmd->add_option("--out", out_path, "Summary JSON output (stdout if omitted)");

  auto* front_cmd = app.add_subcommand("front", "Export terminal objective values from random starts");
  std::size_t starts = 100;
  long front_iters = 100000;
  front_cmd->add_option("--problem", problem, "Problem name or json:PATH")->required();
  front_cmd->add_option("--starts", starts, "Number of starts")->default_val(100);
  front_cmd->add_option("--max-iter", front_iters, "Iteration cap per start")->default_val(100000);
  front_cmd->add_option("--seed", seed, "Seed");
  front_cmd->add_option("--out", out_path, "CSV output")->required();

  auto* flow_cmd = app.add_subcommand("flow", "Integrate the continuous flow with forward Euler");
  flow_cmd->set_help_flag("--help", "Print this help message and exit");
  ampd::FlowConfig fcfg;
  flow_cmd->add_option("--problem", problem, "Problem name or json:PATH")->required();
  flow_cmd->add_option("--h", fcfg.h, "Step size")->default_val(1e-3);
  flow_cmd->add_option("--T", fcfg.T, "Final time")->default_val(20.0);
  // Explicit Euler on theta xi' = Av - b is stiff once theta(t) is small;
  // a large theta0 keeps the default horizon stable.
  flow_cmd->add_option("--theta0", fcfg.theta0, "Initial theta")->default_val(1e6);
  flow_cmd->add_option("--gamma0", fcfg.gamma0, "Initial gamma")->default_val(1.0);
  flow_cmd->add_option("--seed", seed, "Seed for the start point");
  flow_cmd->add_option("--out", out_path, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*solve_cmd) {
      const ampd::Problem p = load_problem(problem, seed);
      const ampd::Vector x0 =
          x0_arg == "auto" ? ampd::sample_start(p, seed, "solve", 0) : read_x0(x0_arg, p.n());
      std::optional<ampd::ParetoReference> refs;
      if (!trace_path.empty() && p.convex()) refs = ampd::pareto_reference(p, 1000, seed);
      scfg.record_trace = !trace_path.empty();
      const ampd::SolveResult res = ampd::solve(p, x0, scfg, refs ? &*refs : nullptr);
      if (!trace_path.empty()) {
        auto out = open_out(trace_path);
        ampd::write_trace_csv(out, res.trace, p.m());
      }
      const std::string js = ampd::solve_result_json(p, res).dump(2);
      if (result_path.empty()) {
        std::cout << js << '\n';
      } else {
        open_out(result_path) << js << '\n';
      }
    } else if (*bench_cmd) {
      const auto names = split_list(suite);
      std::vector<ampd::Problem> problems;
      for (const auto& n : names) problems.push_back(load_problem(n, seed));
      ampd::BenchOptions opt;
      opt.threads = threads;
      const auto solver = solver_name == "ampd" ? ampd::BenchSolver::ampd : ampd::BenchSolver::alamo;
      const auto rows = ampd::run_benchmark(problems, samples, seed, solver, opt);
      nlohmann::json js = nlohmann::json::array();
      for (const auto& r : rows) js.push_back(ampd::to_json(r));
      if (out_path.empty()) {
        std::cout << js.dump(2) << '\n';
      } else {
        open_out(out_path) << js.dump(2) << '\n';
      }
    } else if (*front_cmd) {
      const ampd::Problem p = load_problem(problem, seed);
      const auto front = ampd::export_front(p, starts, front_iters, seed);
      auto out = open_out(out_path);
      ampd::write_front_csv(out, front, p.m());
      if (front.skipped > 0) std::cerr << "warning: " << front.skipped << " start(s) failed and were skipped\n";
    } else if (*flow_cmd) {
      const ampd::Problem p = load_problem(problem, seed);
      fcfg.validate(p.mu());
      const ampd::Vector x0 = ampd::sample_start(p, seed, "flow", 0);
      const auto init = ampd::initial_flow_state(p, x0, x0, ampd::Vector::Zero(p.r()), fcfg);
      const auto [ax, axi] = flow_anchor(p);
      const auto traj = ampd::integrate(p, init, fcfg, ax, axi);
      auto out = open_out(out_path);
      ampd::write_flow_csv(out, traj, p.n());
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ampd::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return 0;
}
