#include "rsr/kernels.hpp"

#include <omp.h>

namespace rsr::kernels {

namespace {

Residuals residuals_serial(const Matrix& basis, const PointSet& points) {
  const Eigen::Index n = points.cols();
  Residuals out{Matrix(n, basis.cols()), Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = points.col(i);
    const Vector c = basis.transpose() * x;
    const Vector q = x - basis * c;
    out.coords.row(i) = c.transpose();
    out.residual(i) = q.norm();
    out.norm(i) = x.norm();
  }
  return out;
}

Residuals residuals_parallel(const Matrix& basis, const PointSet& points) {
  const Eigen::Index n = points.cols();
  const Eigen::Index big_d = points.rows();
  const Eigen::Index d = basis.cols();
  Residuals out{Matrix(n, d), Vector(n), Vector(n)};
  const Matrix basis_t = basis.transpose();

#pragma omp parallel
  {
    Vector c(d);
    Vector q(big_d);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      c.noalias() = basis_t * points.col(i);
      q = points.col(i);
      q.noalias() -= basis * c;
      out.coords.row(i) = c.transpose();
      out.residual(i) = q.norm();
      out.norm(i) = points.col(i).norm();
    }
  }
  return out;
}

Matrix scatter_serial(const PointSet& points, const Matrix& coords, const Vector& weights) {
  Matrix out = Matrix::Zero(points.rows(), coords.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (weights(i) == 0.0) continue;
    out += weights(i) * points.col(i) * coords.row(i);
  }
  return out;
}

Matrix scatter_parallel(const PointSet& points, const Matrix& coords, const Vector& weights) {
  const Eigen::Index big_d = points.rows();
  const Eigen::Index d = coords.cols();
  const Eigen::Index n = points.cols();
  const Matrix weighted = weights.asDiagonal() * coords;
  Matrix out = Matrix::Zero(big_d, d);

  // Each thread owns a contiguous block of output rows and sweeps the points in order.
#pragma omp parallel
  {
    const int nt = omp_get_num_threads();
    const int t = omp_get_thread_num();
    const Eigen::Index r0 = big_d * t / nt;
    const Eigen::Index r1 = big_d * (t + 1) / nt;
    if (r1 > r0) {
      auto block = out.middleRows(r0, r1 - r0);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (weights(i) == 0.0) continue;
        block.noalias() += points.col(i).segment(r0, r1 - r0) * weighted.row(i);
      }
    }
  }
  return out;
}

}  // namespace

Residuals residuals(const Matrix& basis, const PointSet& points, Backend backend) {
  return backend == Backend::Serial ? residuals_serial(basis, points)
                                    : residuals_parallel(basis, points);
}

Matrix weighted_scatter(const PointSet& points, const Matrix& coords, const Vector& weights,
                        Backend backend) {
  return backend == Backend::Serial ? scatter_serial(points, coords, weights)
                                    : scatter_parallel(points, coords, weights);
}

double ordered_sum(const Vector& values) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) total += values(i);
  return total;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace rsr::kernels
