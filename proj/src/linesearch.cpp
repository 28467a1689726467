#include "mbfgs/linesearch.hpp"

#include <stdexcept>
#include <string>

namespace mbfgs {

std::string_view to_string(LineSearchRule rule) {
  switch (rule) {
    case LineSearchRule::armijo: return "armijo";
    case LineSearchRule::wolfe: return "wolfe";
    case LineSearchRule::goldstein: return "goldstein";
  }
  throw std::invalid_argument("unknown line search rule");
}

LineSearchRule parse_rule(std::string_view name) {
  for (LineSearchRule rule : kAllRules) {
    if (to_string(rule) == name) return rule;
  }
  throw std::invalid_argument("unknown line search '" + std::string(name) +
                              "' (expected armijo, wolfe or goldstein)");
}

std::string_view to_string(LineSearchFailure kind) {
  switch (kind) {
    case LineSearchFailure::non_descent: return "non-descent-direction";
    case LineSearchFailure::max_backtracks: return "max-backtracks-exceeded";
    case LineSearchFailure::wolfe_infeasible: return "wolfe-infeasible-by-backtracking";
    case LineSearchFailure::goldstein_window_missed: return "goldstein-window-missed";
  }
  return "unknown";
}

LineSearchSpec LineSearchSpec::defaults(LineSearchRule rule) {
  LineSearchSpec spec;
  spec.rule = rule;
  if (rule == LineSearchRule::goldstein) spec.c1 = 0.25;
  return spec;
}

void LineSearchSpec::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("LineSearchSpec: " + msg); };
  if (!(a_init > 0.0) || !std::isfinite(a_init)) fail("a_init must be positive and finite");
  if (!(tau > 0.0 && tau < 1.0)) fail("tau must lie in (0,1)");
  if (max_backtracks < 1) fail("max_backtracks must be >= 1");
  switch (rule) {
    case LineSearchRule::armijo:
      if (!(c1 > 0.0 && c1 < 1.0)) fail("armijo requires c1 in (0,1)");
      break;
    case LineSearchRule::wolfe:
      if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) fail("wolfe requires 0 < c1 < c2 < 1");
      break;
    case LineSearchRule::goldstein:
      if (!(c1 > 0.0 && c1 < 0.5)) fail("goldstein requires c1 in (0,0.5)");
      break;
  }
}

ConditionFlags check_conditions(LineSearchRule rule, double f_x, const DenseVector& g_x,
                                const DenseVector& dir, double step, double f_new,
                                const DenseVector& g_new, const LineSearchSpec& spec) {
  const double slope = dot(g_x, dir);
  ConditionFlags flags;
  switch (rule) {
    case LineSearchRule::armijo:
      flags.sufficient_decrease = f_new <= f_x + step * spec.c1 * slope;
      break;
    case LineSearchRule::wolfe:
      flags.sufficient_decrease = f_new <= f_x + step * spec.c1 * slope;
      flags.second = dot(g_new, dir) >= spec.c2 * slope;
      break;
    case LineSearchRule::goldstein:
      flags.sufficient_decrease = f_new <= f_x + spec.c1 * step * slope;
      flags.second = f_x + (1.0 - spec.c1) * step * slope <= f_new;
      break;
  }
  return flags;
}

}  // namespace mbfgs
