#include "mbfgs/bench.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace mbfgs::bench {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

std::string join_vector(const DenseVector& x, std::string_view sep) {
  std::string out;
  for (Index i = 0; i < x.size(); ++i) {
    if (i) out += sep;
    out += format_double(x[i]);
  }
  return out;
}

std::string fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
  return buf.data();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

RowStatus status_of(Termination t) {
  switch (t) {
    case Termination::converged: return RowStatus::converged;
    case Termination::max_iters: return RowStatus::max_iters;
    case Termination::linesearch_failure: return RowStatus::linesearch_failure;
  }
  return RowStatus::solver_error;
}

// ------------------------------------------------------------------ JSON

nlohmann::json to_json(const BenchmarkRow& row) {
  const auto& c = row.bench_case;
  nlohmann::json j;
  j["function"] = std::string(cli_name(c.problem));
  j["x0"] = std::vector<double>(c.x0.data(), c.x0.data() + c.x0.size());
  j["rule"] = std::string(to_string(c.rule));
  j["update"] = std::string(to_string(c.update));
  j["repetitions"] = c.repetitions;
  j["grad_tol"] = c.grad_tol ? nlohmann::json(*c.grad_tol) : nlohmann::json(nullptr);
  j["max_iters"] = c.max_iters ? nlohmann::json(*c.max_iters) : nlohmann::json(nullptr);
  j["r"] = row.r;
  j["iterations"] = row.iterations;
  j["mean_wall_time_seconds"] = row.mean_wall_time_seconds;
  j["termination"] = std::string(to_string(row.termination));
  j["total_f_evals"] = row.total_f_evals;
  j["total_g_evals"] = row.total_g_evals;
  j["wolfe_fallbacks"] = row.wolfe_fallbacks;
  j["error"] = row.error;
  return j;
}

BenchmarkRow from_json(const nlohmann::json& j) {
  BenchmarkRow row;
  auto& c = row.bench_case;
  c.problem = parse_problem_id(j.at("function").get<std::string>());
  const auto x0 = j.at("x0").get<std::vector<double>>();
  c.x0 = Eigen::Map<const DenseVector>(x0.data(), static_cast<Index>(x0.size()));
  c.rule = parse_rule(j.at("rule").get<std::string>());
  c.update = parse_update(j.at("update").get<std::string>());
  c.repetitions = j.at("repetitions").get<int>();
  if (!j.at("grad_tol").is_null()) c.grad_tol = j.at("grad_tol").get<double>();
  if (!j.at("max_iters").is_null()) c.max_iters = j.at("max_iters").get<int>();
  row.r = j.at("r").get<double>();
  row.iterations = j.at("iterations").get<int>();
  row.mean_wall_time_seconds = j.at("mean_wall_time_seconds").get<double>();
  row.termination = parse_row_status(j.at("termination").get<std::string>());
  row.total_f_evals = j.at("total_f_evals").get<int>();
  row.total_g_evals = j.at("total_g_evals").get<int>();
  row.wolfe_fallbacks = j.at("wolfe_fallbacks").get<int>();
  row.error = j.at("error").get<std::string>();
  return row;
}

// ------------------------------------------------------------- renderers

std::string emit_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "function,x0,rule,update,repetitions,grad_tol,max_iters,r,iterations,"
         "mean_wall_time_seconds,termination,total_f_evals,total_g_evals,wolfe_fallbacks,error\n";
  for (const auto& row : rows) {
    const auto& c = row.bench_case;
    out << cli_name(c.problem) << ',' << join_vector(c.x0, " ") << ',' << to_string(c.rule) << ','
        << to_string(c.update) << ',' << c.repetitions << ','
        << (c.grad_tol ? format_double(*c.grad_tol) : "") << ','
        << (c.max_iters ? std::to_string(*c.max_iters) : "") << ',' << format_double(row.r) << ','
        << row.iterations << ',' << format_double(row.mean_wall_time_seconds) << ','
        << to_string(row.termination) << ',' << row.total_f_evals << ',' << row.total_g_evals
        << ',' << row.wolfe_fallbacks << ',' << csv_field(row.error) << '\n';
  }
  return out.str();
}

std::string emit_jsonl(const std::vector<BenchmarkRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += to_json(row).dump();
    out += '\n';
  }
  return out;
}

std::string rule_title(LineSearchRule rule) {
  switch (rule) {
    case LineSearchRule::armijo: return "Armijo";
    case LineSearchRule::wolfe: return "Wolfe";
    case LineSearchRule::goldstein: return "Goldstein";
  }
  return "?";
}

// Pivots rules into side-by-side columns, one table per (problem, update).
std::string emit_markdown(const std::vector<BenchmarkRow>& rows) {
  struct Group {
    ProblemId problem;
    UpdateVariant update;
    std::vector<LineSearchRule> rules;
    std::vector<DenseVector> guesses;
    std::map<std::pair<std::size_t, LineSearchRule>, const BenchmarkRow*> cells;
  };
  std::vector<Group> groups;

  for (const auto& row : rows) {
    const auto& c = row.bench_case;
    auto g = std::find_if(groups.begin(), groups.end(), [&](const Group& gr) {
      return gr.problem == c.problem && gr.update == c.update;
    });
    if (g == groups.end()) {
      groups.push_back({c.problem, c.update, {}, {}, {}});
      g = std::prev(groups.end());
    }
    if (std::find(g->rules.begin(), g->rules.end(), c.rule) == g->rules.end()) {
      g->rules.push_back(c.rule);
    }
    auto guess = std::find_if(g->guesses.begin(), g->guesses.end(), [&](const DenseVector& x) {
      return x.size() == c.x0.size() && x == c.x0;
    });
    std::size_t gi = static_cast<std::size_t>(guess - g->guesses.begin());
    if (guess == g->guesses.end()) g->guesses.push_back(c.x0);
    if (!g->cells.emplace(std::make_pair(gi, c.rule), &row).second) {
      throw TableError("emit_table: duplicate row for " + std::string(cli_name(c.problem)) +
                       " x0=(" + join_vector(c.x0, ",") + ") rule " +
                       std::string(to_string(c.rule)));
    }
  }

  std::ostringstream out;
  for (auto& g : groups) {
    std::sort(g.rules.begin(), g.rules.end(), [](LineSearchRule a, LineSearchRule b) {
      return rule_title(a) < rule_title(b);
    });
    for (std::size_t gi = 0; gi < g.guesses.size(); ++gi) {
      for (auto rule : g.rules) {
        if (!g.cells.count({gi, rule})) {
          throw TableError("emit_table: missing rule " + std::string(to_string(rule)) + " for " +
                           std::string(cli_name(g.problem)) + " x0=(" +
                           join_vector(g.guesses[gi], ",") + ")");
        }
      }
    }

    if (out.tellp() > 0) out << '\n';
    out << "### " << make_problem(g.problem).name << " (" << to_string(g.update) << ")\n\n";
    out << "| initial guess | value of r |";
    for (auto rule : g.rules) out << " Iteration in " << rule_title(rule) << " |";
    for (auto rule : g.rules) out << " (Avg Time) " << rule_title(rule) << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < 2 * g.rules.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t gi = 0; gi < g.guesses.size(); ++gi) {
      const BenchmarkRow& first = *g.cells.at({gi, g.rules.front()});
      out << "| (" << join_vector(g.guesses[gi], ",") << ") | " << fixed(first.r, 3) << " |";
      for (auto rule : g.rules) {
        const auto& cell = *g.cells.at({gi, rule});
        out << ' ' << cell.iterations;
        if (cell.termination != RowStatus::converged) out << " [" << to_string(cell.termination) << ']';
        out << " |";
      }
      for (auto rule : g.rules) {
        out << ' ' << fixed(g.cells.at({gi, rule})->mean_wall_time_seconds, 7) << " |";
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

SolverConfig BenchmarkCase::solver_config() const {
  SolverConfig cfg;
  cfg.update = update;
  cfg.linesearch = LineSearchSpec::defaults(rule);
  if (grad_tol) cfg.grad_tol = *grad_tol;
  if (max_iters) cfg.max_iters = *max_iters;
  return cfg;
}

void BenchmarkCase::validate() const {
  const Problem p = make_problem(problem);
  if (x0.size() != p.dim()) {
    throw std::invalid_argument("case " + std::string(cli_name(problem)) + ": x0 has " +
                                std::to_string(x0.size()) + " entries, expected " +
                                std::to_string(p.dim()));
  }
  if (!x0.allFinite()) throw std::invalid_argument("case: x0 has non-finite entries");
  if (repetitions < 1) throw std::invalid_argument("case: repetitions must be >= 1");
}

bool operator==(const BenchmarkCase& a, const BenchmarkCase& b) {
  return a.problem == b.problem && a.x0.size() == b.x0.size() && a.x0 == b.x0 && a.rule == b.rule &&
         a.update == b.update && a.repetitions == b.repetitions && a.grad_tol == b.grad_tol &&
         a.max_iters == b.max_iters;
}

std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::converged: return "converged";
    case RowStatus::max_iters: return "max_iters";
    case RowStatus::linesearch_failure: return "linesearch_failure";
    case RowStatus::solver_error: return "solver_error";
  }
  return "unknown";
}

RowStatus parse_row_status(std::string_view name) {
  for (auto s : {RowStatus::converged, RowStatus::max_iters, RowStatus::linesearch_failure,
                 RowStatus::solver_error}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown termination '" + std::string(name) + "'");
}

OutputFormat parse_format(std::string_view name) {
  if (name == "md" || name == "markdown") return OutputFormat::markdown;
  if (name == "csv") return OutputFormat::csv;
  if (name == "jsonl" || name == "json-lines") return OutputFormat::jsonl;
  throw std::invalid_argument("unknown format '" + std::string(name) + "' (expected md, csv or jsonl)");
}

BenchmarkRow run_case(const BenchmarkCase& c, SolverResult& traced) {
  BenchmarkRow row;
  row.bench_case = c;
  try {
    c.validate();
    const Problem problem = make_problem(c.problem);
    row.r = distance_r(c.x0, problem.known_minimizer);

    SolverConfig cfg = c.solver_config();
    cfg.record_trace = true;
    traced = minimize(problem, c.x0, cfg);
    row.iterations = traced.iterations;
    row.termination = status_of(traced.termination);
    row.total_f_evals = traced.total_f_evals;
    row.total_g_evals = traced.total_g_evals;
    row.wolfe_fallbacks = traced.wolfe_fallbacks;
    row.error = traced.message;

    cfg.record_trace = false;
    double total = 0.0;
    for (int rep = 0; rep < c.repetitions; ++rep) {
      total += minimize(problem, c.x0, cfg).wall_time_seconds;
    }
    row.mean_wall_time_seconds = total / c.repetitions;
  } catch (const std::exception& e) {
    row.termination = RowStatus::solver_error;
    row.error = e.what();
  }
  return row;
}

BenchmarkRow run_case(const BenchmarkCase& c) {
  SolverResult ignored;
  return run_case(c, ignored);
}

std::vector<BenchmarkRow> run_suite(const SuiteConfig& cfg) {
  if (cfg.cases.empty()) throw std::invalid_argument("run_suite: no cases");
  if (cfg.trace_dir) std::filesystem::create_directories(*cfg.trace_dir);

  std::vector<BenchmarkRow> rows(cfg.cases.size());
  std::vector<SolverResult> traces(cfg.trace_dir ? cfg.cases.size() : 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.cases.size(); i = next++) {
      SolverResult traced;
      rows[i] = run_case(cfg.cases[i], traced);
      if (cfg.trace_dir) traces[i] = std::move(traced);
    }
  };

  const int workers = std::clamp<int>(cfg.parallel, 1, static_cast<int>(cfg.cases.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // single writer
  if (cfg.trace_dir) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (traces[i].trace.empty()) continue;
      emit_trace(traces[i], *cfg.trace_dir / trace_file_name(cfg.cases[i]));
    }
  }
  return rows;
}

std::vector<BenchmarkCase> paper_suite(int repetitions, UpdateVariant update) {
  struct Guess {
    ProblemId problem;
    std::vector<double> x0;
  };
  const std::vector<Guess> guesses = {
      {ProblemId::rosenbrock, {2.2, 2.0}},
      {ProblemId::rosenbrock, {2.0, 2.0}},
      {ProblemId::rosenbrock, {1.2, 1.8}},
      {ProblemId::rosenbrock, {0.75, 1.0}},
      {ProblemId::rosenbrock, {0.0, 1.8}},
      {ProblemId::rosenbrock, {1.8, 2.0}},
      {ProblemId::powell_quartic, {4, -1, 0, 1}},
      {ProblemId::powell_quartic, {3, -1, 1, 1}},
      {ProblemId::powell_quartic, {3, -1, 0, 1}},
      {ProblemId::powell_quartic, {3, -1.5, 0, 1.5}},
      {ProblemId::wood, {1.0, 1.2, 1.3, 1.4}},
      {ProblemId::wood, {1.3, 1.2, 1.3, 1.4}},
      {ProblemId::wood, {1.2, 1.2, 1.2, 1.2}},
      {ProblemId::wood, {1.1, 1.2, 1.3, 1.4}},
      {ProblemId::schumer_steiglitz, {0.2, 0.2}},
      {ProblemId::schumer_steiglitz, {0.4, 0.4}},
      {ProblemId::schumer_steiglitz, {0.8, 0.8}},
      {ProblemId::schumer_steiglitz, {-0.4, 0.8}},
      {ProblemId::schumer_steiglitz, {-0.4, 0.6}},
      {ProblemId::schwefel_variant, {4.0, 8.0}},
      {ProblemId::schwefel_variant, {5.0, 6.0}},
      {ProblemId::schwefel_variant, {6.0, 6.0}},
      {ProblemId::schwefel_variant, {3.0, 3.0}},
      {ProblemId::schwefel_variant, {8.0, 6.0}},
  };
  std::vector<BenchmarkCase> cases;
  for (const auto& g : guesses) {
    for (auto rule : {LineSearchRule::armijo, LineSearchRule::goldstein, LineSearchRule::wolfe}) {
      BenchmarkCase c;
      c.problem = g.problem;
      c.x0 = Eigen::Map<const DenseVector>(g.x0.data(), static_cast<Index>(g.x0.size()));
      c.rule = rule;
      c.update = update;
      c.repetitions = repetitions;
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

std::vector<BenchmarkCase> parse_cases(std::string_view text, int repetitions) {
  std::vector<BenchmarkCase> cases;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    try {
      const auto fields = split(body, ';');
      if (fields.size() != 4) {
        throw std::invalid_argument("expected 4 ';'-separated fields, got " +
                                    std::to_string(fields.size()));
      }
      BenchmarkCase c;
      c.problem = parse_problem_id(fields[0]);
      const auto coords = split(fields[1], ',');
      c.x0.resize(static_cast<Index>(coords.size()));
      for (std::size_t i = 0; i < coords.size(); ++i) c.x0[static_cast<Index>(i)] = parse_double(coords[i]);
      c.rule = parse_rule(fields[2]);
      c.update = parse_update(fields[3]);
      c.repetitions = repetitions;
      c.validate();
      cases.push_back(std::move(c));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("cases line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cases;
}

std::string emit_table(const std::vector<BenchmarkRow>& rows, OutputFormat format) {
  if (rows.empty()) throw TableError("emit_table: no rows");
  switch (format) {
    case OutputFormat::markdown: return emit_markdown(rows);
    case OutputFormat::csv: return emit_csv(rows);
    case OutputFormat::jsonl: return emit_jsonl(rows);
  }
  throw std::invalid_argument("emit_table: unknown format");
}

std::vector<BenchmarkRow> parse_jsonl(std::string_view text) {
  std::vector<BenchmarkRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(from_json(nlohmann::json::parse(line)));
  }
  return rows;
}

std::string format_trace(const SolverResult& result) {
  if (result.trace.empty()) throw std::invalid_argument("emit_trace: empty trace");
  const Index n = result.trace.front().x.size();
  std::ostringstream out;
  out << "iter,f,grad_norm,step,backtracks,C,update_applied,wolfe_fallback,f_evals,g_evals";
  for (Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << '\n';
  for (const auto& rec : result.trace) {
    out << rec.k << ',' << format_double(rec.f) << ',' << format_double(rec.grad_norm) << ','
        << format_double(rec.step) << ',' << rec.backtracks << ',' << format_double(rec.C) << ','
        << to_string(rec.update_applied) << ',' << (rec.wolfe_fallback ? 1 : 0) << ','
        << rec.f_evals << ',' << rec.g_evals << ',' << join_vector(rec.x, ",") << '\n';
  }
  return out.str();
}

void emit_trace(const SolverResult& result, const std::filesystem::path& path) {
  const std::string text = format_trace(result);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_trace: cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("emit_trace: write to '" + path.string() + "' failed");
}

std::string trace_file_name(const BenchmarkCase& c) {
  return std::string(cli_name(c.problem)) + "_" + std::string(to_string(c.rule)) + "_" +
         std::string(to_string(c.update)) + "_" + join_vector(c.x0, "_") + ".csv";
}

}  // namespace mbfgs::bench
