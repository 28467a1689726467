#include "mbfgs/linesearch.hpp"

#include <gtest/gtest.h>

#include <random>

namespace mbfgs {
namespace {

FunctionObjective square_1d() {
  return FunctionObjective(
      1, [](const DenseVector& x) { return x[0] * x[0]; },
      [](const DenseVector& x) { return DenseVector(2.0 * x); });
}

/// f(x) = ½ xᵀAx + bᵀx with A SPD.
struct Quadratic {
  Matrix<double> A;
  DenseVector b;

  Index dim() const { return b.size(); }
  double value(const DenseVector& x) const { return 0.5 * x.dot(A * x) + b.dot(x); }
  DenseVector gradient(const DenseVector& x) const { return A * x + b; }
};

Quadratic random_quadratic(std::mt19937& rng, Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix<double> R(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) R(i, j) = u(rng);
  Quadratic q;
  // wide spectrum so a_init = 1 is often too long
  q.A = R.transpose() * R * 20.0 + Matrix<double>::Identity(n, n) * 0.1;
  q.b = DenseVector(n);
  for (Index i = 0; i < n; ++i) q.b[i] = u(rng);
  return q;
}

// Independent oracle: scan the τ-grid and return the first index whose step
// passes the rule's inequalities evaluated from scratch.
int first_acceptable_index(const Quadratic& q, const DenseVector& x, const DenseVector& dir,
                           const LineSearchSpec& spec) {
  const double f0 = q.value(x);
  const double s = q.gradient(x).dot(dir);
  for (int t = 0; t <= spec.max_backtracks; ++t) {
    const double a = spec.a_init * std::pow(spec.tau, t);
    const DenseVector xt = x + a * dir;
    const double ft = q.value(xt);
    bool ok = ft <= f0 + spec.c1 * a * s;
    if (spec.rule == LineSearchRule::wolfe) ok = ok && q.gradient(xt).dot(dir) >= spec.c2 * s;
    if (spec.rule == LineSearchRule::goldstein) ok = ok && ft >= f0 + (1 - spec.c1) * a * s;
    if (ok) return t;
  }
  return -1;
}

TEST(LineSearchSpec, DefaultsAndValidation) {
  const auto armijo = LineSearchSpec::defaults(LineSearchRule::armijo);
  EXPECT_EQ(armijo.a_init, 1.0);
  EXPECT_EQ(armijo.tau, 0.5);
  EXPECT_EQ(armijo.c1, 1e-4);
  EXPECT_EQ(armijo.max_backtracks, 60);
  EXPECT_EQ(LineSearchSpec::defaults(LineSearchRule::wolfe).c2, 0.9);
  EXPECT_EQ(LineSearchSpec::defaults(LineSearchRule::goldstein).c1, 0.25);
  for (auto rule : kAllRules) EXPECT_NO_THROW(LineSearchSpec::defaults(rule).validate());

  LineSearchSpec bad = LineSearchSpec::defaults(LineSearchRule::goldstein);
  bad.c1 = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = LineSearchSpec::defaults(LineSearchRule::wolfe);
  bad.c2 = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad.c2 = 0.9;
  bad.c1 = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = LineSearchSpec{};
  bad.tau = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = LineSearchSpec{};
  bad.a_init = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(parse_rule("more-thuente"), std::invalid_argument);
  for (auto rule : kAllRules) EXPECT_EQ(parse_rule(to_string(rule)), rule);
}

// f = x², x = 1, p = −2: a = 1 lands on f(−1) = 1 > 1 − 4c1; a = 0.5 hits 0.
TEST(Armijo, HandTraceOnParabola) {
  const auto f = square_1d();
  const auto r = armijo_backtrack(f, make_vector({1.0}), make_vector({-2.0}), 1.0, make_vector({2.0}),
                                  LineSearchSpec::defaults(LineSearchRule::armijo));
  EXPECT_EQ(r.step, 0.5);
  EXPECT_EQ(r.backtracks, 1);
  EXPECT_EQ(r.f_new, 0.0);
  EXPECT_EQ(r.g_new[0], 0.0);
  EXPECT_EQ(r.f_evals, 2);
  EXPECT_EQ(r.g_evals, 1);
  EXPECT_TRUE(r.satisfied.all());
}

TEST(Armijo, AcceptableInitialStepTakesNoBacktracks) {
  const auto f = square_1d();
  const auto r = armijo_backtrack(f, make_vector({1.0}), make_vector({-0.5}), 1.0, make_vector({2.0}),
                                  LineSearchSpec::defaults(LineSearchRule::armijo));
  EXPECT_EQ(r.step, 1.0);
  EXPECT_EQ(r.backtracks, 0);
  EXPECT_EQ(r.f_evals, 1);
}

TEST(Armijo, RejectsNonDescentDirection) {
  const auto f = square_1d();
  try {
    armijo_backtrack(f, make_vector({1.0}), make_vector({1.0}), 1.0, make_vector({2.0}),
                     LineSearchSpec::defaults(LineSearchRule::armijo));
    FAIL() << "expected LineSearchError";
  } catch (const LineSearchError& e) {
    EXPECT_EQ(e.kind(), LineSearchFailure::non_descent);
  }
}

TEST(Armijo, ExhaustionCarriesLastTrialStep) {
  // Gradient claims descent but f only grows: a broken gradient.
  FunctionObjective liar(
      1, [](const DenseVector& x) { return std::abs(x[0]) + 1.0; },
      [](const DenseVector&) { return make_vector({1.0}); });
  LineSearchSpec spec = LineSearchSpec::defaults(LineSearchRule::armijo);
  spec.max_backtracks = 5;
  try {
    armijo_backtrack(liar, make_vector({0.0}), make_vector({-1.0}), 1.0, make_vector({1.0}), spec);
    FAIL() << "expected LineSearchError";
  } catch (const LineSearchError& e) {
    EXPECT_EQ(e.kind(), LineSearchFailure::max_backtracks);
    EXPECT_EQ(e.last_step(), 1.0 / 32.0);
    EXPECT_EQ(e.f_evals(), 6);
  }
}

TEST(Wolfe, HandTraceOnParabola) {
  const auto f = square_1d();
  const auto r = wolfe_backtrack(f, make_vector({1.0}), make_vector({-2.0}), 1.0, make_vector({2.0}),
                                 LineSearchSpec::defaults(LineSearchRule::wolfe));
  EXPECT_EQ(r.step, 0.5);
  EXPECT_EQ(r.backtracks, 1);
  EXPECT_EQ(r.satisfied, (ConditionFlags{true, true}));
}

TEST(Wolfe, InfeasibleCurvatureReturnsArmijoFallback) {
  // f = x² from x = 1 along p = −0.01: every halving step has sufficient
  // decrease, yet g(x+ap)·p = −0.02(1 − 0.01a) never reaches 0.9·(−0.02).
  const auto f = square_1d();
  LineSearchSpec spec = LineSearchSpec::defaults(LineSearchRule::wolfe);
  spec.max_backtracks = 10;
  try {
    wolfe_backtrack(f, make_vector({1.0}), make_vector({-0.01}), 1.0, make_vector({2.0}), spec);
    FAIL() << "expected LineSearchError";
  } catch (const LineSearchError& e) {
    EXPECT_EQ(e.kind(), LineSearchFailure::wolfe_infeasible);
    ASSERT_TRUE(e.armijo_fallback().has_value());
    const StepResult& fb = *e.armijo_fallback();
    EXPECT_EQ(fb.step, 1.0);
    EXPECT_EQ(fb.backtracks, 0);
    EXPECT_EQ(fb.f_evals, 11);
    EXPECT_EQ(fb.g_evals, 11);
    EXPECT_EQ(fb.satisfied, (ConditionFlags{true, false}));
  }
}

// f = x², x = 1, p = −2, c1 = 0.25. a = 1: f = 1 > 1 − 1 = 0, upper bound
// fails. a = 0.5: f = 0 ≤ 0.5 and −0.5 ≤ 0, inside the window.
TEST(Goldstein, HandTraceOnParabola) {
  const auto f = square_1d();
  const auto r = goldstein_backtrack(f, make_vector({1.0}), make_vector({-2.0}), 1.0, make_vector({2.0}),
                                     LineSearchSpec::defaults(LineSearchRule::goldstein));
  EXPECT_EQ(r.step, 0.5);
  EXPECT_EQ(r.backtracks, 1);
  EXPECT_EQ(r.satisfied, (ConditionFlags{true, true}));
}

TEST(Goldstein, WindowInsideInitialStep) {
  const auto f = square_1d();
  const auto r = goldstein_backtrack(f, make_vector({1.0}), make_vector({-1.0}), 1.0, make_vector({2.0}),
                                     LineSearchSpec::defaults(LineSearchRule::goldstein));
  EXPECT_EQ(r.step, 1.0);
  EXPECT_EQ(r.backtracks, 0);
}

TEST(Goldstein, WindowMissedReportsBracket) {
  // p = −0.1: a = 1 gives f = 0.81, upper bound 1 − 0.05 holds, lower bound
  // 1 − 0.15 = 0.85 > 0.81 fails. a_init already undershoots.
  const auto f = square_1d();
  try {
    goldstein_backtrack(f, make_vector({1.0}), make_vector({-0.1}), 1.0, make_vector({2.0}),
                        LineSearchSpec::defaults(LineSearchRule::goldstein));
    FAIL() << "expected LineSearchError";
  } catch (const LineSearchError& e) {
    EXPECT_EQ(e.kind(), LineSearchFailure::goldstein_window_missed);
    ASSERT_TRUE(e.bracket().has_value());
    EXPECT_EQ(*e.bracket(), std::make_pair(1.0, 1.0));
  }
}

TEST(Goldstein, WindowSkippedBetweenGridPoints) {
  // Along p = −1 from x = 0 (g·p = −1, c1 = 0.25), f jumps from above the
  // upper bound at a = 1 to below the lower bound at a = 0.5.
  FunctionObjective kinked(
      1,
      [](const DenseVector& x) {
        const double a = -x[0];
        return a > 0.75 ? 0.0 : -2.0 * a;
      },
      [](const DenseVector&) { return make_vector({1.0}); });
  // a = 1: f = 0 > −0.25 (upper fails). a = 0.5: f = −1, upper −0.125 holds,
  // lower −0.375 > −1 fails.
  try {
    goldstein_backtrack(kinked, make_vector({0.0}), make_vector({-1.0}), 0.0, make_vector({1.0}),
                        LineSearchSpec::defaults(LineSearchRule::goldstein));
    FAIL() << "expected LineSearchError";
  } catch (const LineSearchError& e) {
    EXPECT_EQ(e.kind(), LineSearchFailure::goldstein_window_missed);
    EXPECT_EQ(*e.bracket(), std::make_pair(1.0, 0.5));
    EXPECT_EQ(e.last_step(), 0.5);
  }
}

TEST(CheckConditions, BoundaryIsInclusive) {
  const DenseVector g = make_vector({2.0});
  const DenseVector p = make_vector({-2.0});
  const auto spec = LineSearchSpec::defaults(LineSearchRule::armijo);
  const double step = 0.5;
  const double f_x = 1.0;
  const double boundary = f_x + step * spec.c1 * dot(g, p);
  EXPECT_TRUE(check_conditions(LineSearchRule::armijo, f_x, g, p, step, boundary, g, spec)
                  .sufficient_decrease);
  EXPECT_FALSE(check_conditions(LineSearchRule::armijo, f_x, g, p, step, std::nextafter(boundary, 2.0),
                                g, spec)
                   .sufficient_decrease);
}

TEST(CheckConditions, WolfeHandTrace) {
  const auto flags = check_conditions(LineSearchRule::wolfe, 1.0, make_vector({2.0}), make_vector({-2.0}),
                                      0.5, 0.0, make_vector({0.0}),
                                      LineSearchSpec::defaults(LineSearchRule::wolfe));
  EXPECT_EQ(flags, (ConditionFlags{true, true}));
}

TEST(CheckConditions, GoldsteinBelowLowerBound) {
  // lower bound at step 1: 1 + 0.75·(−4) = −2; f_new = −2.5 is below it.
  const auto flags = check_conditions(LineSearchRule::goldstein, 1.0, make_vector({2.0}),
                                      make_vector({-2.0}), 1.0, -2.5, make_vector({0.0}),
                                      LineSearchSpec::defaults(LineSearchRule::goldstein));
  EXPECT_TRUE(flags.sufficient_decrease);
  EXPECT_EQ(flags.second, false);
  EXPECT_FALSE(flags.all());
}

class RandomQuadratics : public ::testing::TestWithParam<LineSearchRule> {};

TEST_P(RandomQuadratics, MatchesBruteForceScan) {
  const LineSearchRule rule = GetParam();
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int nontrivial = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + trial % 4;
    const Quadratic q = random_quadratic(rng, n);
    DenseVector x(n);
    for (Index i = 0; i < n; ++i) x[i] = 3.0 * u(rng);
    const DenseVector g = q.gradient(x);
    const DenseVector dir = -g;
    const auto spec = LineSearchSpec::defaults(rule);
    const int expected = first_acceptable_index(q, x, dir, spec);
    try {
      const StepResult r = backtrack(q, x, dir, q.value(x), g, spec);
      EXPECT_EQ(r.backtracks, expected);
      EXPECT_EQ(r.step, spec.a_init * std::pow(spec.tau, r.backtracks));
      EXPECT_EQ(r.f_new, q.value(x + r.step * dir));
      EXPECT_EQ(r.g_new, q.gradient(x + r.step * dir));
      EXPECT_TRUE(check_conditions(rule, q.value(x), g, dir, r.step, r.f_new, r.g_new, spec).all());
      nontrivial += r.backtracks > 0;
    } catch (const LineSearchError& e) {
      // Goldstein can miss the window on the grid; the scan must agree.
      EXPECT_EQ(rule, LineSearchRule::goldstein) << e.what();
      EXPECT_EQ(e.kind(), LineSearchFailure::goldstein_window_missed);
      EXPECT_EQ(expected, -1);
    }
  }
  EXPECT_GT(nontrivial, 50);
}

INSTANTIATE_TEST_SUITE_P(Rules, RandomQuadratics, ::testing::ValuesIn(kAllRules));

TEST(Armijo, AcceptableIndicesFormAnUpSetOnConvexQuadratics) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto spec = LineSearchSpec::defaults(LineSearchRule::armijo);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 3;
    const Quadratic q = random_quadratic(rng, n);
    DenseVector x(n);
    for (Index i = 0; i < n; ++i) x[i] = 2.0 * u(rng);
    const DenseVector g = q.gradient(x);
    const double f0 = q.value(x);
    bool seen_ok = false;
    for (int t = 0; t <= 40; ++t) {
      const double a = std::pow(0.5, t);
      const bool ok = q.value(x - a * g) <= f0 + spec.c1 * a * g.dot(-g);
      if (seen_ok) EXPECT_TRUE(ok) << "trial " << trial << " t " << t;
      seen_ok = seen_ok || ok;
    }
    EXPECT_TRUE(seen_ok);
  }
}

}  // namespace
}  // namespace mbfgs
