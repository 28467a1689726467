#pragma once

#include "mbfgs/numerics.hpp"

#include <concepts>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mbfgs {

/// Anything with a scalar value and an analytic gradient. Line searches and
/// the solver are written against this, so test fixtures can plug in ad hoc
/// quadratics alongside the benchmark problems.
template <typename F>
concept DifferentiableObjective = requires(const F& f, const DenseVector& x) {
  { f.dim() } -> std::convertible_to<Index>;
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<DenseVector>;
};

/// Wraps a pair of callables as a DifferentiableObjective.
class FunctionObjective {
 public:
  using ValueFn = std::function<double(const DenseVector&)>;
  using GradientFn = std::function<DenseVector(const DenseVector&)>;

  FunctionObjective(Index dim, ValueFn value, GradientFn gradient)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)) {}

  Index dim() const { return dim_; }
  double value(const DenseVector& x) const {
    detail::require_same_dim(x.size(), dim_, "FunctionObjective::value");
    return value_(x);
  }
  DenseVector gradient(const DenseVector& x) const {
    detail::require_same_dim(x.size(), dim_, "FunctionObjective::gradient");
    return gradient_(x);
  }

 private:
  Index dim_;
  ValueFn value_;
  GradientFn gradient_;
};

enum class ProblemId { rosenbrock, powell_quartic, wood, schumer_steiglitz, schwefel_variant };

inline constexpr ProblemId kAllProblems[] = {ProblemId::rosenbrock, ProblemId::powell_quartic,
                                             ProblemId::wood, ProblemId::schumer_steiglitz,
                                             ProblemId::schwefel_variant};

/// CLI spelling: rosenbrock, powell, wood, schumer, schwefel.
std::string_view cli_name(ProblemId id);
ProblemId parse_problem_id(std::string_view name);

template <typename Scalar>
Scalar eval_f(ProblemId id, const Vector<Scalar>& x);
template <typename Scalar>
Vector<Scalar> eval_grad(ProblemId id, const Vector<Scalar>& x);

struct Problem {
  ProblemId id;
  Index dimension;
  std::string name;
  DenseVector known_minimizer;
  double known_min_value = 0.0;

  Index dim() const { return dimension; }
  double value(const DenseVector& x) const { return eval_f(id, x); }
  DenseVector gradient(const DenseVector& x) const { return eval_grad(id, x); }
};

Problem make_problem(ProblemId id);

/// Central differences (f(x+h·eᵢ) − f(x−h·eᵢ)) / 2h; test oracle only.
template <DifferentiableObjective F>
DenseVector fd_gradient(const F& f, const DenseVector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  DenseVector g(x.size());
  DenseVector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double fp = f.value(probe);
    probe[i] = xi - h;
    const double fm = f.value(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// r = ‖x0 − x*‖.
double distance_r(const DenseVector& x0, const DenseVector& x_star);

// ---------------------------------------------------------------------------

namespace detail {
inline Index problem_dim(ProblemId id) {
  switch (id) {
    case ProblemId::powell_quartic:
    case ProblemId::wood:
      return 4;
    case ProblemId::rosenbrock:
    case ProblemId::schumer_steiglitz:
    case ProblemId::schwefel_variant:
      return 2;
  }
  throw std::invalid_argument("unknown problem id");
}
}  // namespace detail

template <typename Scalar>
Scalar eval_f(ProblemId id, const Vector<Scalar>& x) {
  detail::require_same_dim(x.size(), detail::problem_dim(id), "eval_f");
  switch (id) {
    case ProblemId::rosenbrock: {
      const Scalar a = x[1] - x[0] * x[0];
      const Scalar b = Scalar(1) - x[0];
      return Scalar(100) * a * a + b * b;
    }
    case ProblemId::powell_quartic: {
      const Scalar a = x[0] + Scalar(10) * x[1];
      const Scalar b = x[2] - x[3];
      const Scalar c = x[1] - Scalar(2) * x[2];
      const Scalar e = x[0] - x[3];
      return a * a + Scalar(5) * b * b + c * c * c * c + Scalar(10) * e * e * e * e;
    }
    case ProblemId::wood: {
      const Scalar a = x[0] * x[0] - x[1];
      const Scalar b = x[2] * x[2] - x[3];
      const Scalar u = x[1] - Scalar(1);
      const Scalar v = x[3] - Scalar(1);
      return Scalar(100) * a * a + (x[0] - Scalar(1)) * (x[0] - Scalar(1)) +
             (x[2] - Scalar(1)) * (x[2] - Scalar(1)) + Scalar(90) * b * b +
             Scalar(10.1) * (u * u + v * v) + Scalar(19.8) * u * v;
    }
    case ProblemId::schumer_steiglitz: {
      const Scalar a = x[0] * x[0];
      const Scalar b = x[1] * x[1];
      return a * a + b * b;
    }
    case ProblemId::schwefel_variant: {
      const Scalar a = x[0] - Scalar(1);
      const Scalar b = x[1] - Scalar(1);
      const Scalar c = x[0] - x[1] * x[1];
      return a * a + b * b + c * c;
    }
  }
  throw std::invalid_argument("eval_f: unknown problem id");
}

template <typename Scalar>
Vector<Scalar> eval_grad(ProblemId id, const Vector<Scalar>& x) {
  detail::require_same_dim(x.size(), detail::problem_dim(id), "eval_grad");
  Vector<Scalar> g(x.size());
  switch (id) {
    case ProblemId::rosenbrock: {
      const Scalar a = x[1] - x[0] * x[0];
      g[0] = Scalar(-400) * x[0] * a - Scalar(2) * (Scalar(1) - x[0]);
      g[1] = Scalar(200) * a;
      return g;
    }
    case ProblemId::powell_quartic: {
      const Scalar a = x[0] + Scalar(10) * x[1];
      const Scalar b = x[2] - x[3];
      const Scalar c = x[1] - Scalar(2) * x[2];
      const Scalar e = x[0] - x[3];
      const Scalar c3 = c * c * c;
      const Scalar e3 = e * e * e;
      g[0] = Scalar(2) * a + Scalar(40) * e3;
      g[1] = Scalar(20) * a + Scalar(4) * c3;
      g[2] = Scalar(10) * b - Scalar(8) * c3;
      g[3] = Scalar(-10) * b - Scalar(40) * e3;
      return g;
    }
    case ProblemId::wood: {
      const Scalar a = x[0] * x[0] - x[1];
      const Scalar b = x[2] * x[2] - x[3];
      const Scalar u = x[1] - Scalar(1);
      const Scalar v = x[3] - Scalar(1);
      g[0] = Scalar(400) * x[0] * a + Scalar(2) * (x[0] - Scalar(1));
      g[1] = Scalar(-200) * a + Scalar(20.2) * u + Scalar(19.8) * v;
      g[2] = Scalar(2) * (x[2] - Scalar(1)) + Scalar(360) * x[2] * b;
      g[3] = Scalar(-180) * b + Scalar(20.2) * v + Scalar(19.8) * u;
      return g;
    }
    case ProblemId::schumer_steiglitz: {
      g[0] = Scalar(4) * x[0] * x[0] * x[0];
      g[1] = Scalar(4) * x[1] * x[1] * x[1];
      return g;
    }
    case ProblemId::schwefel_variant: {
      const Scalar c = x[0] - x[1] * x[1];
      g[0] = Scalar(2) * (x[0] - Scalar(1)) + Scalar(2) * c;
      g[1] = Scalar(2) * (x[1] - Scalar(1)) - Scalar(4) * x[1] * c;
      return g;
    }
  }
  throw std::invalid_argument("eval_grad: unknown problem id");
}

}  // namespace mbfgs
