#pragma once

// Backtracking step-size rules. Every rule tries a_t = a_init·τ^t for
// t = 0, 1, ..., max_backtracks and accepts the first trial step that
// satisfies its inequalities. None of them ever expands the step.

#include "mbfgs/numerics.hpp"
#include "mbfgs/objectives.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace mbfgs {

enum class LineSearchRule { armijo, wolfe, goldstein };

inline constexpr LineSearchRule kAllRules[] = {LineSearchRule::armijo, LineSearchRule::goldstein,
                                               LineSearchRule::wolfe};

std::string_view to_string(LineSearchRule rule);
LineSearchRule parse_rule(std::string_view name);

struct LineSearchSpec {
  LineSearchRule rule = LineSearchRule::armijo;
  double a_init = 1.0;
  double tau = 0.5;
  double c1 = 1e-4;  // Armijo β, Wolfe c1, Goldstein c1
  double c2 = 0.9;   // Wolfe only
  int max_backtracks = 60;

  /// Defaults per rule; Goldstein uses c1 = 0.25, the others 1e-4.
  static LineSearchSpec defaults(LineSearchRule rule);

  /// Throws std::invalid_argument when the constants leave their open
  /// intervals for the selected rule.
  void validate() const;

  double trial_step(int t) const { return a_init * std::pow(tau, t); }
};

/// One flag per inequality of the rule. For Armijo only `sufficient_decrease`
/// is meaningful. For Wolfe `second` is the curvature condition. For
/// Goldstein `sufficient_decrease` is the upper bound and `second` the lower.
struct ConditionFlags {
  bool sufficient_decrease = false;
  std::optional<bool> second;

  bool all() const { return sufficient_decrease && second.value_or(true); }
  friend bool operator==(const ConditionFlags&, const ConditionFlags&) = default;
};

struct StepResult {
  double step = 0.0;
  int backtracks = 0;
  double f_new = 0.0;
  DenseVector g_new;
  int f_evals = 0;
  int g_evals = 0;
  ConditionFlags satisfied;
};

enum class LineSearchFailure { non_descent, max_backtracks, wolfe_infeasible, goldstein_window_missed };

std::string_view to_string(LineSearchFailure kind);

class LineSearchError : public std::runtime_error {
 public:
  LineSearchError(LineSearchFailure kind, std::string what, double last_step, int f_evals,
                  int g_evals)
      : std::runtime_error(std::move(what)),
        kind_(kind),
        last_step_(last_step),
        f_evals_(f_evals),
        g_evals_(g_evals) {}

  LineSearchFailure kind() const { return kind_; }
  double last_step() const { return last_step_; }
  int f_evals() const { return f_evals_; }
  int g_evals() const { return g_evals_; }

  /// wolfe_infeasible: largest trial step that passed sufficient decrease.
  /// Its eval counts cover the whole failed search.
  const std::optional<StepResult>& armijo_fallback() const { return fallback_; }

  /// goldstein_window_missed: (step that overshot the upper bound, step that
  /// undershot the lower bound). When a_init itself undershoots, both are a_init.
  const std::optional<std::pair<double, double>>& bracket() const { return bracket_; }

  LineSearchError& with_fallback(StepResult s) {
    fallback_ = std::move(s);
    return *this;
  }
  LineSearchError& with_bracket(double longer, double shorter) {
    bracket_ = std::make_pair(longer, shorter);
    return *this;
  }

 private:
  LineSearchFailure kind_;
  double last_step_;
  int f_evals_;
  int g_evals_;
  std::optional<StepResult> fallback_;
  std::optional<std::pair<double, double>> bracket_;
};

/// Post-hoc verifier: re-evaluates the rule's inequalities from raw numbers.
/// All inequalities are inclusive.
ConditionFlags check_conditions(LineSearchRule rule, double f_x, const DenseVector& g_x,
                                const DenseVector& dir, double step, double f_new,
                                const DenseVector& g_new, const LineSearchSpec& spec);

namespace detail {

inline double descent_slope(const DenseVector& g_x, const DenseVector& dir) {
  const double slope = dot(g_x, dir);
  if (!(slope < 0.0)) {
    throw LineSearchError(LineSearchFailure::non_descent,
                          "line search: direction is not a descent direction (g·p = " +
                              std::to_string(slope) + ")",
                          0.0, 0, 0);
  }
  return slope;
}

template <DifferentiableObjective F>
StepResult armijo_impl(const F& f, const DenseVector& x, const DenseVector& dir, double f_x,
                       const DenseVector& g_x, const LineSearchSpec& spec) {
  const double slope = descent_slope(g_x, dir);
  int f_evals = 0;
  double a = spec.a_init;
  for (int t = 0; t <= spec.max_backtracks; ++t) {
    a = spec.trial_step(t);
    const DenseVector trial = x + a * dir;
    const double f_trial = f.value(trial);
    ++f_evals;
    if (f_trial <= f_x + a * spec.c1 * slope) {
      return {a, t, f_trial, f.gradient(trial), f_evals, 1, {true, std::nullopt}};
    }
  }
  throw LineSearchError(LineSearchFailure::max_backtracks,
                        "armijo: no acceptable step within max_backtracks", a, f_evals, 0);
}

template <DifferentiableObjective F>
StepResult wolfe_impl(const F& f, const DenseVector& x, const DenseVector& dir, double f_x,
                      const DenseVector& g_x, const LineSearchSpec& spec) {
  const double slope = descent_slope(g_x, dir);
  int f_evals = 0;
  int g_evals = 0;
  double a = spec.a_init;
  std::optional<StepResult> best_armijo;
  for (int t = 0; t <= spec.max_backtracks; ++t) {
    a = spec.trial_step(t);
    const DenseVector trial = x + a * dir;
    const double f_trial = f.value(trial);
    ++f_evals;
    if (!(f_trial <= f_x + a * spec.c1 * slope)) continue;
    DenseVector g_trial = f.gradient(trial);
    ++g_evals;
    if (dot(g_trial, dir) >= spec.c2 * slope) {
      return {a, t, f_trial, std::move(g_trial), f_evals, g_evals, {true, true}};
    }
    if (!best_armijo) best_armijo = StepResult{a, t, f_trial, std::move(g_trial), 0, 0, {true, false}};
  }
  if (best_armijo) {
    best_armijo->f_evals = f_evals;
    best_armijo->g_evals = g_evals;
    LineSearchError err(LineSearchFailure::wolfe_infeasible,
                        "wolfe: curvature condition unattainable by backtracking", a, f_evals,
                        g_evals);
    err.with_fallback(std::move(*best_armijo));
    throw err;
  }
  throw LineSearchError(LineSearchFailure::max_backtracks,
                        "wolfe: no acceptable step within max_backtracks", a, f_evals, g_evals);
}

template <DifferentiableObjective F>
StepResult goldstein_impl(const F& f, const DenseVector& x, const DenseVector& dir, double f_x,
                          const DenseVector& g_x, const LineSearchSpec& spec) {
  const double slope = descent_slope(g_x, dir);
  int f_evals = 0;
  double a = spec.a_init;
  for (int t = 0; t <= spec.max_backtracks; ++t) {
    a = spec.trial_step(t);
    const DenseVector trial = x + a * dir;
    const double f_trial = f.value(trial);
    ++f_evals;
    const bool upper = f_trial <= f_x + spec.c1 * a * slope;
    if (!upper) continue;
    const bool lower = f_x + (1.0 - spec.c1) * a * slope <= f_trial;
    if (lower) {
      return {a, t, f_trial, f.gradient(trial), f_evals, 1, {true, true}};
    }
    // Upper bound holds but the step is already too short: shrinking further
    // cannot re-enter the window.
    LineSearchError err(LineSearchFailure::goldstein_window_missed,
                        "goldstein: backtracking skipped the acceptance window", a, f_evals, 0);
    err.with_bracket(t > 0 ? spec.trial_step(t - 1) : a, a);
    throw err;
  }
  throw LineSearchError(LineSearchFailure::max_backtracks,
                        "goldstein: no acceptable step within max_backtracks", a, f_evals, 0);
}

}  // namespace detail

template <DifferentiableObjective F>
StepResult armijo_backtrack(const F& f, const DenseVector& x, const DenseVector& dir, double f_x,
                            const DenseVector& g_x, LineSearchSpec spec) {
  spec.rule = LineSearchRule::armijo;
  spec.validate();
  return detail::armijo_impl(f, x, dir, f_x, g_x, spec);
}

template <DifferentiableObjective F>
StepResult wolfe_backtrack(const F& f, const DenseVector& x, const DenseVector& dir, double f_x,
                           const DenseVector& g_x, LineSearchSpec spec) {
  spec.rule = LineSearchRule::wolfe;
  spec.validate();
  return detail::wolfe_impl(f, x, dir, f_x, g_x, spec);
}

template <DifferentiableObjective F>
StepResult goldstein_backtrack(const F& f, const DenseVector& x, const DenseVector& dir,
                               double f_x, const DenseVector& g_x, LineSearchSpec spec) {
  spec.rule = LineSearchRule::goldstein;
  spec.validate();
  return detail::goldstein_impl(f, x, dir, f_x, g_x, spec);
}

/// Dispatches on spec.rule.
template <DifferentiableObjective F>
StepResult backtrack(const F& f, const DenseVector& x, const DenseVector& dir, double f_x,
                     const DenseVector& g_x, const LineSearchSpec& spec) {
  detail::require_same_dim(x.size(), dir.size(), "line search");
  detail::require_same_dim(x.size(), g_x.size(), "line search");
  switch (spec.rule) {
    case LineSearchRule::armijo: return armijo_backtrack(f, x, dir, f_x, g_x, spec);
    case LineSearchRule::wolfe: return wolfe_backtrack(f, x, dir, f_x, g_x, spec);
    case LineSearchRule::goldstein: return goldstein_backtrack(f, x, dir, f_x, g_x, spec);
  }
  throw std::invalid_argument("line search: unknown rule");
}

}  // namespace mbfgs
