#include "rsr/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rsr {

namespace {

constexpr double kOrthoTol = 1e-10;

double orthonormality_error(const Matrix& basis) {
  const Matrix gram = basis.transpose() * basis;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

void require_same_shape(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim())
    throw ConfigError("dimension mismatch: G(" + std::to_string(a.ambient_dim()) + "," +
                      std::to_string(a.dim()) + ") vs G(" + std::to_string(b.ambient_dim()) +
                      "," + std::to_string(b.dim()) + ")");
}

// Singular values of Q_0 V_1 (sines, descending) and of V_0^T V_1 (cosines,
// descending). Small angles come from the sines and large ones from the cosines.
Vector combined_angles(const Vector& sines_desc, const Vector& cosines_desc) {
  const Eigen::Index d = sines_desc.size();
  Vector angles(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double s = std::clamp(sines_desc(j), 0.0, 1.0);
    const double c = std::clamp(cosines_desc(d - 1 - j), -1.0, 1.0);
    angles(j) = s < std::numbers::sqrt2 / 2 ? std::asin(s) : std::acos(c);
  }
  // Mixed sources can break monotonicity at the 1e-16 level.
  for (Eigen::Index j = 1; j < d; ++j) angles(j) = std::min(angles(j), angles(j - 1));
  return angles;
}

}  // namespace

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() < 1 || basis_.cols() > basis_.rows())
    throw ConfigError("subspace needs 1 <= d <= D, got D=" + std::to_string(basis_.rows()) +
                      " d=" + std::to_string(basis_.cols()));
  if (!basis_.allFinite()) throw NumericError("subspace basis has non-finite entries");
  if (orthonormality_error(basis_) > kOrthoTol)
    throw ConfigError("subspace basis is not orthonormal");
}

Subspace orthonormalize(const Matrix& m) {
  if (m.cols() < 1 || m.cols() > m.rows())
    throw ConfigError("orthonormalize needs 1 <= d <= D");
  if (!m.allFinite()) throw NumericError("orthonormalize: non-finite input");
  const Eigen::Index d = m.cols();

  Eigen::ColPivHouseholderQR<Matrix> rank_probe(m);
  rank_probe.setThreshold(1e-12);
  if (rank_probe.rank() < d)
    throw NumericError("rank deficient: numerical rank " + std::to_string(rank_probe.rank()) +
                       " < " + std::to_string(d));

  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), d);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return Subspace(std::move(q));
}

PrincipalDecomposition principal_decomposition(const Subspace& l0, const Subspace& l1) {
  require_same_shape(l0, l1);
  const Matrix& v0 = l0.basis();
  const Matrix& v1 = l1.basis();
  const Eigen::Index d = l0.dim();

  const Matrix cross = v0.transpose() * v1;
  Eigen::JacobiSVD<Matrix> cos_svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix sine_part = l0.residual(v1);
  Eigen::JacobiSVD<Matrix> sin_svd(sine_part, Eigen::ComputeThinU | Eigen::ComputeThinV);

  PrincipalDecomposition pd;
  pd.angles = combined_angles(sin_svd.singularValues(), cos_svd.singularValues());
  pd.left_vectors.resize(v0.rows(), d);
  pd.right_vectors.resize(v0.rows(), d);

  const bool all_small = pd.angles(0) < std::numbers::pi / 4;
  if (all_small) {
    // Q_0 y_j = sin(theta_j) u_j, and P_0 y_j = cos(theta_j) v_j with cos > 1/sqrt(2).
    pd.right_vectors = v1 * sin_svd.matrixV();
    for (Eigen::Index j = 0; j < d; ++j) {
      Vector p = l0.project(Vector(pd.right_vectors.col(j)));
      pd.left_vectors.col(j) = p / p.norm();
    }
  } else {
    // Cosines come out descending; reverse so the largest angle is first.
    for (Eigen::Index j = 0; j < d; ++j) {
      pd.left_vectors.col(j) = v0 * cos_svd.matrixU().col(d - 1 - j);
      pd.right_vectors.col(j) = v1 * cos_svd.matrixV().col(d - 1 - j);
    }
  }

  Eigen::Index k = 0;
  while (k < d && pd.angles(k) > kZeroAngle) ++k;
  pd.interaction_dim = k;
  pd.complementary.resize(v0.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Vector u;
    if (all_small) {
      u = sin_svd.matrixU().col(j);
    } else {
      u = l0.residual(Vector(pd.right_vectors.col(j)));
      u /= u.norm();
    }
    // Enforce u_j perp v_j and u_j^T y_j > 0 exactly up to roundoff.
    u -= pd.left_vectors.col(j) * pd.left_vectors.col(j).dot(u);
    u /= u.norm();
    if (u.dot(pd.right_vectors.col(j)) < 0) u = -u;
    pd.complementary.col(j) = u;
  }
  return pd;
}

double theta1(const Subspace& l0, const Subspace& l1) {
  require_same_shape(l0, l1);
  const Matrix sine_part = l0.residual(l1.basis());
  Eigen::JacobiSVD<Matrix> sin_svd(sine_part);
  const double s = std::clamp(sin_svd.singularValues()(0), 0.0, 1.0);
  if (s < std::numbers::sqrt2 / 2) return std::asin(s);
  Eigen::JacobiSVD<Matrix> cos_svd(Matrix(l0.basis().transpose() * l1.basis()));
  const double c = std::clamp(cos_svd.singularValues()(l0.dim() - 1), -1.0, 1.0);
  return std::acos(c);
}

Subspace geodesic(const Subspace& l0, const Subspace& l1, double t) {
  const PrincipalDecomposition pd = principal_decomposition(l0, l1);
  if (pd.angles(0) >= std::numbers::pi / 2 - 1e-8)
    throw NumericError("geodesic not unique: largest principal angle is pi/2");
  Matrix basis = pd.left_vectors;
  for (Eigen::Index j = 0; j < pd.interaction_dim; ++j) {
    const double phi = pd.angles(j) * t;
    basis.col(j) = pd.left_vectors.col(j) * std::cos(phi) + pd.complementary.col(j) * std::sin(phi);
  }
  return orthonormalize(basis);
}

Subspace geodesic_step(const Subspace& v, const Matrix& g, double t) {
  if (g.rows() != v.ambient_dim() || g.cols() != v.dim())
    throw ConfigError("geodesic_step: velocity shape does not match subspace");
  if (!g.allFinite()) throw NumericError("geodesic_step: non-finite gradient");
  if (t == 0.0) return v;

  const Matrix velocity = -v.residual(g);
  Eigen::JacobiSVD<Matrix> svd(velocity, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix& u = svd.matrixU();
  const Matrix& w = svd.matrixV();
  const Vector& sigma = svd.singularValues();

  const Vector cos_diag = (sigma * t).array().cos();
  const Vector sin_diag = (sigma * t).array().sin();
  const Matrix next = (v.basis() * w) * cos_diag.asDiagonal() * w.transpose() +
                      u * sin_diag.asDiagonal() * w.transpose();
  return orthonormalize(next);
}

Subspace random_subspace(Eigen::Index ambient, Eigen::Index dim, Rng& rng) {
  if (dim < 1 || dim > ambient)
    throw ConfigError("random_subspace needs 1 <= d <= D, got D=" + std::to_string(ambient) +
                      " d=" + std::to_string(dim));
  return orthonormalize(gaussian_matrix(ambient, dim, rng));
}

Matrix random_rotation(Eigen::Index d, Rng& rng) {
  return orthonormalize(gaussian_matrix(d, d, rng)).basis();
}

Subspace subspace_at_angle(const Subspace& l_star, double gamma, Rng& rng) {
  if (!(gamma > 0.0) || !(gamma < std::numbers::pi / 2))
    throw ConfigError("subspace_at_angle: gamma must lie in (0, pi/2)");
  const Eigen::Index big_d = l_star.ambient_dim();
  const Eigen::Index d = l_star.dim();
  if (big_d < d + 1) throw ConfigError("subspace_at_angle: needs D >= d + 1");

  const Eigen::Index rotated = std::min(d, big_d - d);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int attempt = 0; attempt < 16; ++attempt) {
    const Matrix inside = l_star.basis() * random_rotation(d, rng);
    const Subspace outside = orthonormalize(l_star.residual(gaussian_matrix(big_d, rotated, rng)));

    Matrix basis = inside;
    for (Eigen::Index j = 0; j < rotated; ++j) {
      const double phi = j == 0 ? gamma : gamma * unit(rng);
      basis.col(j) = inside.col(j) * std::cos(phi) + outside.basis().col(j) * std::sin(phi);
    }
    Subspace candidate = orthonormalize(basis);
    if (std::abs(theta1(candidate, l_star) - gamma) <= 1e-8) return candidate;
  }
  throw NumericError("subspace_at_angle: could not hit the requested angle");
}

}  // namespace rsr
