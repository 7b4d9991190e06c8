#pragma once

#include "rsr/common.hpp"

// Per-point kernels behind the energy, gradient and alignment sums.
//
// Two backends compute the same quantities. `Serial` is the plain reference
// loop, one point at a time. `Parallel` splits work with OpenMP: residuals are
// computed point-parallel, and the D x d scatter is computed row-parallel so that
// each output entry is summed by exactly one thread in point order. No floating
// point reduction crosses threads, so Parallel results are bitwise identical for
// any thread count. Serial and Parallel agree to roundoff, not bitwise.
namespace rsr::kernels {

enum class Backend { Serial, Parallel };

struct Residuals {
  Matrix coords;    // N x d, row i = x_i^T V
  Vector residual;  // ||Q_V x_i||, computed from the explicit residual vector
  Vector norm;      // ||x_i||
};

Residuals residuals(const Matrix& basis, const PointSet& points, Backend backend);

/// sum_i weight_i * x_i * coords_i^T, a D x d matrix.
Matrix weighted_scatter(const PointSet& points, const Matrix& coords, const Vector& weights,
                        Backend backend);

/// Sum in index order.
double ordered_sum(const Vector& values);

int max_threads();

}  // namespace rsr::kernels
