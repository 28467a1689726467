#pragma once

// Dense linear-algebra kernel shared by the solver, line searches and
// objectives. Thin layer over Eigen: vectors are plain Eigen column vectors,
// symmetric matrices are wrapped so that symmetry holds by construction.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace mbfgs {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using DenseVector = Vector<double>;
using Index = Eigen::Index;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}
}  // namespace detail

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Builds a vector and enforces dim >= 1 and finite entries.
template <typename Scalar = double>
Vector<Scalar> make_vector(std::initializer_list<Scalar> entries) {
  if (entries.size() == 0) throw std::invalid_argument("make_vector: empty vector");
  Vector<Scalar> v(static_cast<Index>(entries.size()));
  std::copy(entries.begin(), entries.end(), v.data());
  if (!v.allFinite()) throw std::invalid_argument("make_vector: non-finite entry");
  return v;
}

/// Symmetric n x n matrix. Writes go through set(), which mirrors the entry,
/// so entry(i,j) == entry(j,i) holds bit-for-bit at all times.
template <typename Scalar>
class SymMatrix {
 public:
  using Dense = Matrix<Scalar>;

  explicit SymMatrix(Index order) : m_(Dense::Zero(check_order(order), order)) {}

  static SymMatrix identity(Index order) {
    SymMatrix s(order);
    s.m_.setIdentity();
    return s;
  }

  static SymMatrix diagonal(const Vector<Scalar>& diag) {
    SymMatrix s(diag.size());
    s.m_.diagonal() = diag;
    if (!s.m_.allFinite()) throw std::invalid_argument("SymMatrix: non-finite entry");
    return s;
  }

  /// Rejects inputs that are not square, not exactly symmetric, or non-finite.
  static SymMatrix from_dense(const Dense& m) {
    if (m.rows() != m.cols()) throw DimensionError("SymMatrix: matrix is not square");
    if (!m.allFinite()) throw std::invalid_argument("SymMatrix: non-finite entry");
    if (m != m.transpose()) throw std::invalid_argument("SymMatrix: matrix is not symmetric");
    SymMatrix s(m.rows());
    s.m_ = m;
    return s;
  }

  /// Symmetrizes as ½(m + mᵀ). Used after rank-two updates, where rounding
  /// can leave the two triangles a few ulps apart.
  static SymMatrix symmetrized(const Dense& m) {
    if (m.rows() != m.cols()) throw DimensionError("SymMatrix: matrix is not square");
    Dense sym = (m + m.transpose()) * Scalar(0.5);
    return from_dense(sym);
  }

  Index order() const { return m_.rows(); }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  void set(Index i, Index j, Scalar value) {
    if (!std::isfinite(static_cast<double>(value))) {
      throw std::invalid_argument("SymMatrix: non-finite entry");
    }
    m_(i, j) = value;
    m_(j, i) = value;
  }

  const Dense& dense() const { return m_; }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.m_ == b.m_; }

 private:
  static Index check_order(Index order) {
    if (order < 1) throw std::invalid_argument("SymMatrix: order must be >= 1");
    return order;
  }

  Dense m_;
};

using SymMatrixd = SymMatrix<double>;

template <typename Scalar>
Scalar dot(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  detail::require_same_dim(a.size(), b.size(), "dot");
  return a.dot(b);
}

template <typename Scalar>
Scalar norm2(const Vector<Scalar>& a) {
  return std::sqrt(a.dot(a));
}

template <typename Scalar>
Vector<Scalar> mat_vec(const SymMatrix<Scalar>& m, const Vector<Scalar>& v) {
  detail::require_same_dim(m.order(), v.size(), "mat_vec");
  return m.dense() * v;
}

/// Cholesky-style elimination; true iff every pivot exceeds
/// tol * max(1, largest diagonal entry).
template <typename Scalar>
bool is_spd(const SymMatrix<Scalar>& m, Scalar tol) {
  const Index n = m.order();
  Matrix<Scalar> a = m.dense();
  const Scalar threshold = tol * std::max(Scalar(1), a.diagonal().maxCoeff());
  for (Index k = 0; k < n; ++k) {
    const Scalar pivot = a(k, k);
    if (!(pivot > threshold)) return false;
    for (Index i = k + 1; i < n; ++i) {
      const Scalar factor = a(i, k) / pivot;
      for (Index j = k + 1; j <= i; ++j) {
        a(i, j) -= factor * a(j, k);
      }
    }
  }
  return true;
}

}  // namespace mbfgs
