#include "mbfgs/solver.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mbfgs {

std::string_view to_string(UpdateVariant v) {
  switch (v) {
    case UpdateVariant::bfgs: return "bfgs";
    case UpdateVariant::mbfgs: return "mbfgs";
  }
  throw std::invalid_argument("unknown update variant");
}

UpdateVariant parse_update(std::string_view name) {
  if (name == "bfgs") return UpdateVariant::bfgs;
  if (name == "mbfgs") return UpdateVariant::mbfgs;
  throw std::invalid_argument("unknown update '" + std::string(name) +
                              "' (expected mbfgs or bfgs)");
}

std::string_view to_string(UpdateApplied u) {
  switch (u) {
    case UpdateApplied::initial: return "initial";
    case UpdateApplied::bfgs_branch: return "bfgs_branch";
    case UpdateApplied::mbfgs_branch: return "mbfgs_branch";
    case UpdateApplied::skipped: return "skipped";
  }
  throw std::invalid_argument("unknown update branch");
}

UpdateApplied parse_update_applied(std::string_view name) {
  for (auto u : {UpdateApplied::initial, UpdateApplied::bfgs_branch, UpdateApplied::mbfgs_branch,
                 UpdateApplied::skipped}) {
    if (to_string(u) == name) return u;
  }
  throw std::invalid_argument("unknown update branch '" + std::string(name) + "'");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::linesearch_failure: return "linesearch_failure";
  }
  throw std::invalid_argument("unknown termination");
}

Termination parse_termination(std::string_view name) {
  for (auto t : {Termination::converged, Termination::max_iters, Termination::linesearch_failure}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown termination '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("SolverConfig: grad_tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(curvature_skip_tol >= 0.0)) {
    throw std::invalid_argument("SolverConfig: curvature_skip_tol must be >= 0");
  }
  if (!(c_round_tol >= 0.0)) throw std::invalid_argument("SolverConfig: c_round_tol must be >= 0");
  linesearch.validate();
}

double compute_C(double f_j, double f_next, const DenseVector& g_j, const DenseVector& g_next,
                 const DenseVector& d_j) {
  detail::require_same_dim(g_j.size(), g_next.size(), "compute_C");
  detail::require_same_dim(g_j.size(), d_j.size(), "compute_C");
  return 2.0 * (f_j - f_next) + (g_next + g_j).dot(d_j);
}

double C_scale(double f_j, double f_next, const DenseVector& g_j, const DenseVector& g_next,
               const DenseVector& d_j) {
  detail::require_same_dim(g_j.size(), g_next.size(), "C_scale");
  detail::require_same_dim(g_j.size(), d_j.size(), "C_scale");
  return 2.0 * (std::abs(f_j) + std::abs(f_next)) + std::abs(g_next.dot(d_j)) + std::abs(g_j.dot(d_j));
}

DenseVector modified_y(const DenseVector& h, const DenseVector& d, double C) {
  detail::require_same_dim(h.size(), d.size(), "modified_y");
  const double dd = d.squaredNorm();
  if (dd == 0.0) throw std::invalid_argument("modified_y: degenerate step (d = 0)");
  return h + (std::max(C, 0.0) / dd) * d;
}

bool curvature_ok(const DenseVector& d, const DenseVector& y, double tol) {
  detail::require_same_dim(d.size(), y.size(), "curvature_ok");
  return d.dot(y) > tol * d.norm() * y.norm();
}

SymMatrixd inverse_update(const SymMatrixd& M, const DenseVector& d, const DenseVector& y,
                          double curvature_skip_tol) {
  detail::require_same_dim(M.order(), d.size(), "inverse_update");
  detail::require_same_dim(d.size(), y.size(), "inverse_update");
  if (!curvature_ok(d, y, curvature_skip_tol)) {
    throw SkipUpdate("inverse_update: curvature condition dᵀy > 0 violated");
  }
  const double rho = 1.0 / d.dot(y);
  const Index n = M.order();
  const Matrix<double> V = Matrix<double>::Identity(n, n) - rho * y * d.transpose();
  const Matrix<double> next = V.transpose() * M.dense() * V + rho * d * d.transpose();
  return SymMatrixd::symmetrized(next);
}

SymMatrixd direct_update(const SymMatrixd& B, const DenseVector& d, const DenseVector& y) {
  detail::require_same_dim(B.order(), d.size(), "direct_update");
  detail::require_same_dim(d.size(), y.size(), "direct_update");
  const DenseVector Bd = mat_vec(B, d);
  const double dBd = d.dot(Bd);
  const double dy = d.dot(y);
  if (!(dBd > 0.0) || !(dy > 0.0)) {
    throw std::invalid_argument("direct_update: nonpositive denominator");
  }
  const Matrix<double> next = B.dense() - (Bd * Bd.transpose()) / dBd + (y * y.transpose()) / dy;
  return SymMatrixd::symmetrized(next);
}

}  // namespace mbfgs
