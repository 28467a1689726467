#pragma once

// Experiment harness: runs (problem, x0, rule, update) grids, averages wall
// time over repetitions, and renders iteration/time tables and trace files.

#include "mbfgs/linesearch.hpp"
#include "mbfgs/objectives.hpp"
#include "mbfgs/solver.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mbfgs::bench {

struct BenchmarkCase {
  ProblemId problem = ProblemId::rosenbrock;
  DenseVector x0;
  LineSearchRule rule = LineSearchRule::armijo;
  UpdateVariant update = UpdateVariant::mbfgs;
  int repetitions = 10;
  std::optional<double> grad_tol;
  std::optional<int> max_iters;

  /// Defaults for the rule, with the overrides applied.
  SolverConfig solver_config() const;
  void validate() const;
};

bool operator==(const BenchmarkCase& a, const BenchmarkCase& b);

/// A row's outcome. `solver_error` covers exceptions thrown by the solver
/// itself (non-finite values, bad input); the rest mirror Termination.
enum class RowStatus { converged, max_iters, linesearch_failure, solver_error };

std::string_view to_string(RowStatus s);
RowStatus parse_row_status(std::string_view name);

struct BenchmarkRow {
  BenchmarkCase bench_case;
  double r = 0.0;
  int iterations = 0;
  double mean_wall_time_seconds = 0.0;
  RowStatus termination = RowStatus::converged;
  int total_f_evals = 0;
  int total_g_evals = 0;
  int wolfe_fallbacks = 0;
  std::string error;

  friend bool operator==(const BenchmarkRow&, const BenchmarkRow&) = default;
};

enum class OutputFormat { markdown, csv, jsonl };

OutputFormat parse_format(std::string_view name);

struct SuiteConfig {
  std::vector<BenchmarkCase> cases;
  OutputFormat format = OutputFormat::markdown;
  std::optional<std::filesystem::path> trace_dir;
  int parallel = 1;
};

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One traced run for the iteration count, then `repetitions` untraced runs
/// for timing. Solver exceptions end up in the row, never propagate.
BenchmarkRow run_case(const BenchmarkCase& c);

/// Same as run_case, also returning the traced solver result.
BenchmarkRow run_case(const BenchmarkCase& c, SolverResult& traced);

/// Rows come back in case order. Throws std::invalid_argument on an empty
/// case list; per-case failures are recorded in their rows.
std::vector<BenchmarkRow> run_suite(const SuiteConfig& cfg);

/// Every initial guess from the published iteration tables, crossed with the
/// three rules (Armijo, Goldstein, Wolfe): 24 x 3 = 72 cases.
std::vector<BenchmarkCase> paper_suite(int repetitions = 10,
                                       UpdateVariant update = UpdateVariant::mbfgs);

/// Parses `function;x0;rule;update` lines (x0 comma-separated). Blank lines
/// and lines starting with '#' are skipped.
std::vector<BenchmarkCase> parse_cases(std::string_view text, int repetitions = 10);

std::string emit_table(const std::vector<BenchmarkRow>& rows, OutputFormat format);
std::vector<BenchmarkRow> parse_jsonl(std::string_view text);

std::string format_trace(const SolverResult& result);
void emit_trace(const SolverResult& result, const std::filesystem::path& path);

/// File name used for per-case traces, e.g. rosenbrock_armijo_mbfgs_1.8_2.csv.
std::string trace_file_name(const BenchmarkCase& c);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace mbfgs::bench
