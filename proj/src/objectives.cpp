#include "mbfgs/objectives.hpp"

#include <stdexcept>
#include <string>

namespace mbfgs {

std::string_view cli_name(ProblemId id) {
  switch (id) {
    case ProblemId::rosenbrock: return "rosenbrock";
    case ProblemId::powell_quartic: return "powell";
    case ProblemId::wood: return "wood";
    case ProblemId::schumer_steiglitz: return "schumer";
    case ProblemId::schwefel_variant: return "schwefel";
  }
  throw std::invalid_argument("unknown problem id");
}

ProblemId parse_problem_id(std::string_view name) {
  for (ProblemId id : kAllProblems) {
    if (cli_name(id) == name) return id;
  }
  throw std::invalid_argument("unknown function '" + std::string(name) +
                              "' (expected rosenbrock, powell, wood, schumer or schwefel)");
}

Problem make_problem(ProblemId id) {
  switch (id) {
    case ProblemId::rosenbrock:
      return {id, 2, "Rosenbrock", make_vector({1.0, 1.0}), 0.0};
    case ProblemId::powell_quartic:
      return {id, 4, "Powell's quartic", make_vector({0.0, 0.0, 0.0, 0.0}), 0.0};
    case ProblemId::wood:
      return {id, 4, "Wood", make_vector({1.0, 1.0, 1.0, 1.0}), 0.0};
    case ProblemId::schumer_steiglitz:
      return {id, 2, "Schumer-Steiglitz", make_vector({0.0, 0.0}), 0.0};
    case ProblemId::schwefel_variant:
      return {id, 2, "Schwefel (variant)", make_vector({1.0, 1.0}), 0.0};
  }
  throw std::invalid_argument("make_problem: unknown problem id");
}

double distance_r(const DenseVector& x0, const DenseVector& x_star) {
  detail::require_same_dim(x0.size(), x_star.size(), "distance_r");
  return (x0 - x_star).norm();
}

}  // namespace mbfgs
