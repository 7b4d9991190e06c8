#pragma once

#include "rsr/common.hpp"

namespace rsr {

/// A point of G(D,d), held as a D x d matrix with orthonormal columns.
class Subspace {
 public:
  /// Wraps an already orthonormal basis; throws ConfigError if basis^T basis deviates
  /// from the identity by more than 1e-10 (max-abs), NumericError on non-finite entries.
  explicit Subspace(Matrix basis);

  const Matrix& basis() const { return basis_; }
  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }

  /// P x
  Vector project(const Vector& x) const { return basis_ * (basis_.transpose() * x); }
  /// Q x = x - P x
  Vector residual(const Vector& x) const { return x - project(x); }
  /// Q m, applied column-wise.
  Matrix residual(const Matrix& m) const { return m - basis_ * (basis_.transpose() * m); }

 private:
  Matrix basis_;
};

/// Principal angles (largest first), principal vectors and the complementary
/// orthogonal basis between two subspaces of equal dimension.
struct PrincipalDecomposition {
  Vector angles;           // d values, non-increasing, in [0, pi/2]
  Matrix left_vectors;     // v_j, columns, in the first subspace
  Matrix right_vectors;    // y_j, columns, in the second subspace
  Matrix complementary;    // u_j for j < interaction_dim
  Eigen::Index interaction_dim = 0;
};

/// Angles at or below this value count as zero for the interaction dimension.
inline constexpr double kZeroAngle = 1e-12;

Subspace orthonormalize(const Matrix& m);

PrincipalDecomposition principal_decomposition(const Subspace& l0, const Subspace& l1);

/// Largest principal angle; the metric on G(D,d).
double theta1(const Subspace& l0, const Subspace& l1);

/// Geodesic with L(0) = l0 and L(1) = l1. Requires theta1 < pi/2 - 1e-8.
Subspace geodesic(const Subspace& l0, const Subspace& l1, double t);

/// Follows the geodesic from V with initial velocity -G for time t.
/// G is projected onto the tangent space at V before use.
Subspace geodesic_step(const Subspace& v, const Matrix& g, double t);

Subspace random_subspace(Eigen::Index ambient, Eigen::Index dim, Rng& rng);

/// A subspace whose largest principal angle with l_star is exactly gamma.
/// The leading direction is rotated by gamma; the others by Uniform(0, gamma).
Subspace subspace_at_angle(const Subspace& l_star, double gamma, Rng& rng);

/// Uniform random orthonormal d x d matrix.
Matrix random_rotation(Eigen::Index d, Rng& rng);

}  // namespace rsr
