#ifndef ZOQ_LINALG_HPP
#define ZOQ_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "zoq/core.hpp"

namespace zoq {

/// Symmetry within a relative tolerance of the largest entry.
template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  using std::max;
  const auto scale = max(typename Derived::Scalar(1), m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m, const std::string& what,
                       typename Derived::Scalar rel_tol = 1e-12) {
  if (!is_symmetric(m, rel_tol)) fail(Errc::invalid_argument, what + " is not symmetric");
}

template <typename Derived>
Vector<typename Derived::Scalar> symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  using M = Matrix<typename Derived::Scalar>;
  M sym = (m + m.transpose()) / 2;
  return Eigen::SelfAdjointEigenSolver<M>(sym, Eigen::EigenvaluesOnly).eigenvalues();
}

template <typename Derived>
typename Derived::Scalar lambda_max(const Eigen::MatrixBase<Derived>& m) {
  return symmetric_eigenvalues(m).maxCoeff();
}

template <typename Derived>
typename Derived::Scalar lambda_min(const Eigen::MatrixBase<Derived>& m) {
  return symmetric_eigenvalues(m).minCoeff();
}

template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar rel_tol = 1e-10) {
  if (!is_symmetric(m, rel_tol)) return false;
  using std::max;
  const auto scale = max(typename Derived::Scalar(1), m.cwiseAbs().maxCoeff());
  return lambda_min(m) >= -rel_tol * scale;
}

/// Largest singular value by power iteration on M^T M, stopping once the
/// relative change of the estimate drops below tol.
template <typename Derived>
typename Derived::Scalar power_iteration_norm(const Eigen::MatrixBase<Derived>& m,
                                              typename Derived::Scalar tol = 1e-10,
                                              int max_iter = 10000) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::sqrt;
  if (m.size() == 0) return Scalar(0);
  const Matrix<Scalar> gram = m.transpose() * m;
  // deterministic start with components in every direction
  Vector<Scalar> v(gram.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = Scalar(1) + Scalar(i) / Scalar(v.size() + 1);
  v.normalize();
  Scalar estimate(0);
  for (int it = 0; it < max_iter; ++it) {
    Vector<Scalar> w = gram * v;
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) return Scalar(0);
    const Scalar next = v.dot(w);
    v = w / norm;
    if (abs(next - estimate) <= tol * abs(next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return sqrt(estimate);
}

/// Spectral norm: dense eigen-solve on the Gram matrix up to dimension 64,
/// power iteration beyond.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using std::sqrt;
  using std::max;
  if (m.size() == 0) return typename Derived::Scalar(0);
  if (m.cols() <= 64) {
    const Matrix<typename Derived::Scalar> gram = m.transpose() * m;
    return sqrt(max(typename Derived::Scalar(0), lambda_max(gram)));
  }
  return power_iteration_norm(m);
}

}  // namespace zoq

#endif  // ZOQ_LINALG_HPP
