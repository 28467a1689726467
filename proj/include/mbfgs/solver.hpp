#pragma once

// Quasi-Newton driver maintaining the inverse approximation M_k.
//
//   p_k     = -M_k g_k
//   x_{k+1} = x_k + a_k p_k                     (a_k from a backtracking rule)
//   d       = x_{k+1} - x_k,  h = g_{k+1} - g_k
//   C       = 2(f_k - f_{k+1}) + (g_{k+1} + g_k)ᵀ d
//   y       = h + max(C,0)/‖d‖² · d             (modified BFGS; plain BFGS uses y = h)
//   M_{k+1} = (I - ρ d yᵀ) M_k (I - ρ y dᵀ) + ρ d dᵀ,   ρ = 1/(dᵀy)
//
// C vanishes identically on quadratics, so on convex quadratics the modified
// and plain updates coincide.

#include "mbfgs/linesearch.hpp"
#include "mbfgs/numerics.hpp"
#include "mbfgs/objectives.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mbfgs {

enum class UpdateVariant { bfgs, mbfgs };

std::string_view to_string(UpdateVariant v);
UpdateVariant parse_update(std::string_view name);

/// Which update produced M_{k+1}. `initial` marks the record for x_0.
enum class UpdateApplied { initial, bfgs_branch, mbfgs_branch, skipped };

std::string_view to_string(UpdateApplied u);
UpdateApplied parse_update_applied(std::string_view name);

enum class Termination { converged, max_iters, linesearch_failure };

std::string_view to_string(Termination t);
Termination parse_termination(std::string_view name);

struct IterationRecord {
  int k = 0;
  DenseVector x;
  double f = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  int backtracks = 0;
  double C = 0.0;
  UpdateApplied update_applied = UpdateApplied::initial;
  bool wolfe_fallback = false;
  int f_evals = 0;  // cumulative
  int g_evals = 0;  // cumulative
};

/// Everything the solver saw during one accepted step; handed to
/// SolverConfig::observer when set.
struct StepDiagnostics {
  int k = 0;
  DenseVector x, g, direction;
  double f = 0.0;
  StepResult line_search;
  bool wolfe_fallback = false;
  DenseVector d, h, y;
  double C = 0.0;
  UpdateApplied update_applied = UpdateApplied::skipped;
  SymMatrixd M_before{1};
  SymMatrixd M_after{1};
};

struct SolverConfig {
  UpdateVariant update = UpdateVariant::mbfgs;
  double grad_tol = 1e-6;
  int max_iters = 2000;
  double curvature_skip_tol = 1e-12;
  // C counts as positive only above c_round_tol times its cancellation scale.
  double c_round_tol = 1e-14;
  LineSearchSpec linesearch{};
  bool record_trace = false;
  std::function<void(const StepDiagnostics&)> observer;

  void validate() const;
};

struct SolverResult {
  DenseVector x_final;
  double f_final = 0.0;
  double grad_norm_final = 0.0;
  int iterations = 0;
  Termination termination = Termination::converged;
  std::string message;  // line-search failure detail, empty otherwise
  double wall_time_seconds = 0.0;
  std::vector<IterationRecord> trace;
  int total_f_evals = 0;
  int total_g_evals = 0;
  int wolfe_fallbacks = 0;
};

/// Raised for non-finite f or g; names the offending iterate.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 2(f_j − f_next) + (g_next + g_j)ᵀ d_j.
double compute_C(double f_j, double f_next, const DenseVector& g_j, const DenseVector& g_next,
                 const DenseVector& d_j);

/// Magnitude of the terms summed in compute_C; rounding error in C scales with it.
double C_scale(double f_j, double f_next, const DenseVector& g_j, const DenseVector& g_next,
               const DenseVector& d_j);

/// h + max(C,0)/‖d‖² · d. Throws on d = 0.
DenseVector modified_y(const DenseVector& h, const DenseVector& d, double C);

/// True when dᵀy > tol·‖d‖·‖y‖, i.e. the rank-two update keeps M SPD.
bool curvature_ok(const DenseVector& d, const DenseVector& y, double tol);

class SkipUpdate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inverse-form BFGS update; satisfies M₊ y = d. Throws SkipUpdate when the
/// curvature precondition fails.
SymMatrixd inverse_update(const SymMatrixd& M, const DenseVector& d, const DenseVector& y,
                          double curvature_skip_tol = 1e-12);

/// Direct form B − B d dᵀ B / (dᵀ B d) + y yᵀ / (dᵀ y); satisfies B₊ d = y.
/// Kept as an independent oracle for inverse_update.
SymMatrixd direct_update(const SymMatrixd& B, const DenseVector& d, const DenseVector& y);

template <DifferentiableObjective F>
SolverResult minimize(const F& f, const DenseVector& x0, const SolverConfig& cfg) {
  cfg.validate();
  detail::require_same_dim(x0.size(), f.dim(), "minimize");
  const auto start = std::chrono::steady_clock::now();

  auto require_finite = [](int k, const DenseVector& x, double fx, const DenseVector& gx) {
    if (std::isfinite(fx) && gx.allFinite()) return;
    std::string coords;
    for (Index i = 0; i < x.size(); ++i) {
      coords += (i ? "," : "") + std::to_string(x[i]);
    }
    throw NonFiniteError("minimize: non-finite f or gradient at iterate " + std::to_string(k) +
                         " x=(" + coords + ")");
  };

  SolverResult result;
  DenseVector x = x0;
  double fx = f.value(x);
  DenseVector g = f.gradient(x);
  require_finite(0, x, fx, g);
  result.total_f_evals = 1;
  result.total_g_evals = 1;
  SymMatrixd M = SymMatrixd::identity(x.size());

  if (cfg.record_trace) {
    result.trace.push_back({0, x, fx, g.norm(), 0.0, 0, 0.0, UpdateApplied::initial, false, 1, 1});
  }

  int k = 0;
  result.termination = Termination::converged;
  while (g.norm() > cfg.grad_tol) {
    if (k >= cfg.max_iters) {
      result.termination = Termination::max_iters;
      break;
    }
    const DenseVector p = -mat_vec(M, g);

    StepResult ls;
    bool fallback = false;
    try {
      ls = backtrack(f, x, p, fx, g, cfg.linesearch);
    } catch (const LineSearchError& e) {
      if (e.kind() == LineSearchFailure::wolfe_infeasible && e.armijo_fallback()) {
        // fallback eval counts cover the whole failed search
        ls = *e.armijo_fallback();
        fallback = true;
        ++result.wolfe_fallbacks;
      } else {
        result.total_f_evals += e.f_evals();
        result.total_g_evals += e.g_evals();
        result.termination = Termination::linesearch_failure;
        result.message = e.what();
        break;
      }
    }
    result.total_f_evals += ls.f_evals;
    result.total_g_evals += ls.g_evals;

    DenseVector x_next = x + ls.step * p;
    require_finite(k + 1, x_next, ls.f_new, ls.g_new);

    const DenseVector d = x_next - x;
    const DenseVector h = ls.g_new - g;
    double C = 0.0;
    DenseVector y = h;
    UpdateApplied applied = UpdateApplied::bfgs_branch;
    if (cfg.update == UpdateVariant::mbfgs) {
      C = compute_C(fx, ls.f_new, g, ls.g_new, d);
      if (C > cfg.c_round_tol * C_scale(fx, ls.f_new, g, ls.g_new, d)) {
        y = modified_y(h, d, C);
        applied = UpdateApplied::mbfgs_branch;
      }
    }

    std::optional<SymMatrixd> M_before;
    if (cfg.observer) M_before = M;
    if (curvature_ok(d, y, cfg.curvature_skip_tol)) {
      M = inverse_update(M, d, y, cfg.curvature_skip_tol);
    } else {
      applied = UpdateApplied::skipped;
    }

    if (cfg.observer) {
      StepDiagnostics diag;
      diag.k = k;
      diag.x = x;
      diag.g = g;
      diag.direction = p;
      diag.f = fx;
      diag.line_search = ls;
      diag.wolfe_fallback = fallback;
      diag.d = d;
      diag.h = h;
      diag.y = y;
      diag.C = C;
      diag.update_applied = applied;
      diag.M_before = std::move(*M_before);
      diag.M_after = M;
      cfg.observer(diag);
    }

    x = std::move(x_next);
    fx = ls.f_new;
    g = std::move(ls.g_new);
    ++k;

    if (cfg.record_trace) {
      result.trace.push_back({k, x, fx, g.norm(), ls.step, ls.backtracks, C, applied, fallback,
                              result.total_f_evals, result.total_g_evals});
    }
  }

  result.x_final = std::move(x);
  result.f_final = fx;
  result.grad_norm_final = g.norm();
  result.iterations = k;
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace mbfgs
