#pragma once

#include "rsr/common.hpp"
#include "rsr/grassmann.hpp"
#include "rsr/kernels.hpp"

namespace rsr {

/// Points with ||Q_V x|| <= tol * ||x|| are treated as lying on the subspace.
inline constexpr double kDefaultActiveTol = 1e-12;

struct EnergyEval {
  double value = 0.0;
  Eigen::Index active_count = 0;
  Eigen::Index skipped_count = 0;
};

/// Least absolute deviations energy: sum_i ||Q_L x_i||.
EnergyEval energy(const Subspace& l, const PointSet& points, double tol_active = kDefaultActiveTol,
                  kernels::Backend backend = kernels::Backend::Parallel);

/// -sum over active points of x x^T V / ||Q_V x||.
Matrix euclidean_subderivative(const Subspace& v, const PointSet& points,
                               double tol_active = kDefaultActiveTol,
                               kernels::Backend backend = kernels::Backend::Parallel);

/// Q_V times the Euclidean subderivative; tangent at V.
Matrix grass_gradient(const Subspace& v, const PointSet& points,
                      double tol_active = kDefaultActiveTol,
                      kernels::Backend backend = kernels::Backend::Parallel);

/// Energy and Grassmannian gradient from one pass over the data.
struct EnergyAndGradient {
  EnergyEval energy;
  Matrix gradient;
};
EnergyAndGradient energy_and_gradient(const Subspace& v, const PointSet& points,
                                      double tol_active = kDefaultActiveTol,
                                      kernels::Backend backend = kernels::Backend::Parallel);

/// Derivative at t=0 of F(geodesic(l0, l1, t)), with t in [0,1] spanning the geodesic.
double geodesic_subderivative(const Subspace& l0, const Subspace& l1, const PointSet& points,
                              double tol_active = kDefaultActiveTol);

/// The arclength geodesic from l that rotates only the block of largest principal
/// angles toward l_star, with the others held fixed.
Subspace special_geodesic(const Subspace& l, const Subspace& l_star, double t);

/// Derivative at t=0 of F along special_geodesic(l, l_star, t).
double special_geodesic_derivative(const Subspace& l, const Subspace& l_star,
                                   const PointSet& points, double tol_active = kDefaultActiveTol);

/// Angles within this absolute distance of theta_1 belong to the leading block.
inline constexpr double kAngleBlockTol = 1e-9;

}  // namespace rsr
