// mbfgs: command-line front end.
//
//   mbfgs solve --function rosenbrock --x0 "1.8,2.0" --linesearch armijo --update mbfgs
//   mbfgs bench --suite paper --format md
//   mbfgs bench --cases cases.txt --format jsonl --out rows.jsonl
//
// Exit codes: 0 success, 1 usage error, 2 solver failure (solve only).

#include "mbfgs/bench.hpp"
#include "mbfgs/solver.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

constexpr int kUsageError = 1;
constexpr int kSolverFailure = 2;

mbfgs::DenseVector parse_x0(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("bad coordinate '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("--x0 is empty");
  return Eigen::Map<mbfgs::DenseVector>(values.data(), static_cast<mbfgs::Index>(values.size()));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct SolveArgs {
  std::string function;
  std::string x0;
  std::string linesearch = "armijo";
  std::string update = "mbfgs";
  double tol = 1e-6;
  int max_iter = 2000;
  std::string trace;
};

struct BenchArgs {
  std::string suite;
  std::string cases;
  int reps = 10;
  std::string format = "md";
  std::string out;
  int parallel = 1;
  std::string trace_dir;
};

int run_solve(const SolveArgs& args) {
  mbfgs::Problem problem;
  mbfgs::DenseVector x0;
  mbfgs::SolverConfig cfg;
  try {
    problem = mbfgs::make_problem(mbfgs::parse_problem_id(args.function));
    x0 = parse_x0(args.x0);
    if (x0.size() != problem.dim()) {
      throw std::invalid_argument("--x0 needs " + std::to_string(problem.dim()) + " coordinates for " +
                                  args.function);
    }
    cfg.update = mbfgs::parse_update(args.update);
    cfg.linesearch = mbfgs::LineSearchSpec::defaults(mbfgs::parse_rule(args.linesearch));
    cfg.grad_tol = args.tol;
    cfg.max_iters = args.max_iter;
    cfg.record_trace = !args.trace.empty();
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }

  mbfgs::SolverResult result;
  try {
    result = mbfgs::minimize(problem, x0, cfg);
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverFailure;
  }

  using mbfgs::bench::format_double;
  std::cout << "function      " << args.function << '\n'
            << "linesearch    " << args.linesearch << '\n'
            << "update        " << args.update << '\n'
            << "r             " << format_double(mbfgs::distance_r(x0, problem.known_minimizer)) << '\n'
            << "termination   " << mbfgs::to_string(result.termination) << '\n'
            << "iterations    " << result.iterations << '\n'
            << "f             " << format_double(result.f_final) << '\n'
            << "grad_norm     " << format_double(result.grad_norm_final) << '\n'
            << "x             (";
  for (mbfgs::Index i = 0; i < result.x_final.size(); ++i) {
    std::cout << (i ? "," : "") << format_double(result.x_final[i]);
  }
  std::cout << ")\n"
            << "f_evals       " << result.total_f_evals << '\n'
            << "g_evals       " << result.total_g_evals << '\n'
            << "wall_time_s   " << format_double(result.wall_time_seconds) << '\n';
  if (!result.message.empty()) std::cout << "message       " << result.message << '\n';

  if (!args.trace.empty()) {
    try {
      mbfgs::bench::emit_trace(result, args.trace);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kSolverFailure;
    }
  }
  return result.termination == mbfgs::Termination::converged ? 0 : kSolverFailure;
}

int run_bench(const BenchArgs& args) {
  mbfgs::bench::SuiteConfig cfg;
  try {
    if (args.suite.empty() == args.cases.empty()) {
      throw std::invalid_argument("give exactly one of --suite or --cases");
    }
    if (!args.suite.empty()) {
      if (args.suite != "paper") throw std::invalid_argument("unknown suite '" + args.suite + "'");
      cfg.cases = mbfgs::bench::paper_suite(args.reps);
    } else {
      cfg.cases = mbfgs::bench::parse_cases(read_file(args.cases), args.reps);
    }
    if (cfg.cases.empty()) throw std::invalid_argument("no cases to run");
    cfg.format = mbfgs::bench::parse_format(args.format);
    cfg.parallel = args.parallel;
    if (!args.trace_dir.empty()) cfg.trace_dir = args.trace_dir;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }

  const auto rows = mbfgs::bench::run_suite(cfg);
  std::string text;
  try {
    text = mbfgs::bench::emit_table(rows, cfg.format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.out);
    if (!(out << text)) {
      std::cerr << "error: cannot write '" << args.out << "'\n";
      return kUsageError;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modified BFGS with backtracking line searches"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Minimize one benchmark function");
  solve_cmd->add_option("--function", solve.function, "rosenbrock|powell|wood|schumer|schwefel")
      ->required();
  solve_cmd->add_option("--x0", solve.x0, "Initial guess, comma-separated")->required();
  solve_cmd->add_option("--linesearch", solve.linesearch, "armijo|wolfe|goldstein");
  solve_cmd->add_option("--update", solve.update, "mbfgs|bfgs");
  solve_cmd->add_option("--tol", solve.tol, "Gradient-norm tolerance");
  solve_cmd->add_option("--max-iter", solve.max_iter, "Iteration cap");
  solve_cmd->add_option("--trace", solve.trace, "Write per-iteration CSV trace");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  auto* suite_opt = bench_cmd->add_option("--suite", bench.suite, "Built-in suite (paper)");
  auto* cases_opt = bench_cmd->add_option("--cases", bench.cases, "File of function;x0;rule;update lines");
  suite_opt->excludes(cases_opt);
  bench_cmd->add_option("--reps", bench.reps, "Timing repetitions per case")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--format", bench.format, "md|csv|jsonl");
  bench_cmd->add_option("--out", bench.out, "Output file (default stdout)");
  bench_cmd->add_option("--parallel", bench.parallel, "Worker threads")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--trace-dir", bench.trace_dir, "Write one trace CSV per case here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (*solve_cmd) return run_solve(solve);
  return run_bench(bench);
}
