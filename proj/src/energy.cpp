#include "rsr/energy.hpp"

#include <cmath>
#include <string>

namespace rsr {

namespace {

void check_points(const PointSet& points, Eigen::Index ambient) {
  if (points.cols() > 0 && points.rows() != ambient)
    throw ConfigError("points have dimension " + std::to_string(points.rows()) +
                      ", subspace lives in R^" + std::to_string(ambient));
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    if (!points.col(i).allFinite())
      throw NumericError("non-finite coordinates in point " + std::to_string(i));
}

bool is_active(double residual, double norm, double tol_active) {
  return norm > 0.0 && residual > tol_active * norm;
}

// Weights 1/||Q x|| on active points, zero elsewhere.
Vector active_weights(const kernels::Residuals& r, double tol_active, Eigen::Index* active) {
  Vector w = Vector::Zero(r.residual.size());
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (is_active(r.residual(i), r.norm(i), tol_active)) {
      w(i) = 1.0 / r.residual(i);
      ++count;
    }
  }
  if (active) *active = count;
  return w;
}

// residual(i) is ||Q x_i|| for active points and 0 otherwise.
struct ActiveProjections {
  Vector residual;
  Matrix left;   // N x m, x_i^T a_j
  Matrix right;  // N x m, x_i^T b_j
};

ActiveProjections project_pairs(const Subspace& l, const Matrix& a, const Matrix& b,
                                const PointSet& points, double tol_active) {
  ActiveProjections out{Vector::Zero(points.cols()), a.transpose() * points,
                        b.transpose() * points};
  out.left.transposeInPlace();
  out.right.transposeInPlace();
  const kernels::Residuals r = kernels::residuals(l.basis(), points, kernels::Backend::Parallel);
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    if (is_active(r.residual(i), r.norm(i), tol_active)) out.residual(i) = r.residual(i);
  return out;
}

}  // namespace

EnergyEval energy(const Subspace& l, const PointSet& points, double tol_active,
                  kernels::Backend backend) {
  check_points(points, l.ambient_dim());
  const kernels::Residuals r = kernels::residuals(l.basis(), points, backend);
  EnergyEval out;
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    is_active(r.residual(i), r.norm(i), tol_active) ? ++out.active_count : ++out.skipped_count;
  out.value = kernels::ordered_sum(r.residual);
  return out;
}

EnergyAndGradient energy_and_gradient(const Subspace& v, const PointSet& points,
                                      double tol_active, kernels::Backend backend) {
  if (tol_active < 0) throw ConfigError("tol_active must be non-negative");
  check_points(points, v.ambient_dim());
  const kernels::Residuals r = kernels::residuals(v.basis(), points, backend);
  EnergyAndGradient out;
  const Vector w = active_weights(r, tol_active, &out.energy.active_count);
  out.energy.skipped_count = points.cols() - out.energy.active_count;
  out.energy.value = kernels::ordered_sum(r.residual);
  const Matrix euclid = -kernels::weighted_scatter(points, r.coords, w, backend);
  out.gradient = v.residual(euclid);
  return out;
}

Matrix euclidean_subderivative(const Subspace& v, const PointSet& points, double tol_active,
                               kernels::Backend backend) {
  if (tol_active < 0) throw ConfigError("tol_active must be non-negative");
  check_points(points, v.ambient_dim());
  const kernels::Residuals r = kernels::residuals(v.basis(), points, backend);
  const Vector w = active_weights(r, tol_active, nullptr);
  return -kernels::weighted_scatter(points, r.coords, w, backend);
}

Matrix grass_gradient(const Subspace& v, const PointSet& points, double tol_active,
                      kernels::Backend backend) {
  return v.residual(euclidean_subderivative(v, points, tol_active, backend));
}

double geodesic_subderivative(const Subspace& l0, const Subspace& l1, const PointSet& points,
                              double tol_active) {
  check_points(points, l0.ambient_dim());
  const PrincipalDecomposition pd = principal_decomposition(l0, l1);
  const Eigen::Index k = pd.interaction_dim;
  if (k == 0) throw ConfigError("direction undefined: subspaces coincide");
  if (points.cols() == 0) return 0.0;

  const ActiveProjections proj =
      project_pairs(l0, pd.left_vectors.leftCols(k), pd.complementary, points, tol_active);
  Vector contrib = Vector::Zero(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (proj.residual(i) == 0.0) continue;
    double s = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) s += pd.angles(j) * proj.left(i, j) * proj.right(i, j);
    contrib(i) = s / proj.residual(i);
  }
  return -kernels::ordered_sum(contrib);
}

namespace {

Eigen::Index leading_block(const Vector& angles) {
  Eigen::Index l = 1;
  while (l < angles.size() && angles(0) - angles(l) <= kAngleBlockTol) ++l;
  return l;
}

}  // namespace

Subspace special_geodesic(const Subspace& l, const Subspace& l_star, double t) {
  const PrincipalDecomposition pd = principal_decomposition(l, l_star);
  if (pd.interaction_dim == 0) throw ConfigError("direction undefined: subspaces coincide");
  const Eigen::Index block = std::min(leading_block(pd.angles), pd.interaction_dim);
  Matrix basis = pd.left_vectors;
  for (Eigen::Index j = 0; j < block; ++j)
    basis.col(j) = pd.left_vectors.col(j) * std::cos(t) + pd.complementary.col(j) * std::sin(t);
  return orthonormalize(basis);
}

double special_geodesic_derivative(const Subspace& l, const Subspace& l_star,
                                   const PointSet& points, double tol_active) {
  check_points(points, l.ambient_dim());
  const PrincipalDecomposition pd = principal_decomposition(l, l_star);
  if (pd.interaction_dim == 0) throw ConfigError("direction undefined: subspaces coincide");
  if (points.cols() == 0) return 0.0;
  const Eigen::Index block = std::min(leading_block(pd.angles), pd.interaction_dim);

  const ActiveProjections proj = project_pairs(l, pd.left_vectors.leftCols(block),
                                               pd.complementary.leftCols(block), points,
                                               tol_active);
  Vector contrib = Vector::Zero(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (proj.residual(i) == 0.0) continue;
    contrib(i) = proj.left.row(i).dot(proj.right.row(i)) / proj.residual(i);
  }
  return -kernels::ordered_sum(contrib);
}

}  // namespace rsr
