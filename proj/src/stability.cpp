#include "rsr/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rsr {

namespace {

const Subspace& require_truth(const Dataset& data) {
  if (!data.l_star) throw ConfigError("dataset carries no ground-truth subspace");
  return *data.l_star;
}

void require_gamma(double gamma) {
  if (!(gamma > 0 && gamma < std::numbers::pi / 2))
    throw ConfigError("gamma must lie in (0, pi/2)");
}

double max_alignment(const PointSet& outliers, const std::vector<Subspace>& subspaces) {
  std::vector<double> values(subspaces.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < subspaces.size(); ++i) values[i] = alignment(outliers, subspaces[i]);
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

}  // namespace

double permeance(const PointSet& inliers, const Subspace& l_star, Diagnostics* diag) {
  if (inliers.cols() == 0) {
    if (diag) diag->warn("permeance: empty inlier set");
    return 0.0;
  }
  const Eigen::Index d = l_star.dim();
  Matrix scatter = Matrix::Zero(d, d);
  bool off_subspace = false;
  for (Eigen::Index i = 0; i < inliers.cols(); ++i) {
    const double norm = inliers.col(i).norm();
    if (norm == 0.0) continue;
    const Vector c = l_star.basis().transpose() * inliers.col(i);
    if (l_star.residual(Vector(inliers.col(i))).norm() > 1e-8 * norm) off_subspace = true;
    scatter.noalias() += c * c.transpose() / norm;
  }
  if (off_subspace && diag) diag->warn("permeance: some inliers lie off L* (relative 1e-8)");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues()(0));
}

double alignment(const PointSet& outliers, const Subspace& l, double tol_active) {
  if (outliers.cols() == 0) return 0.0;
  return spectral_norm(grass_gradient(l, outliers, tol_active));
}

double alignment_global_bound(const PointSet& outliers) {
  if (outliers.cols() == 0) return 0.0;
  return std::sqrt(static_cast<double>(outliers.cols())) * spectral_norm(outliers);
}

std::vector<Subspace> sample_ball(const Subspace& l_star, double gamma, int n, std::uint64_t seed) {
  require_gamma(gamma);
  std::vector<Subspace> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double angle = gamma * (1.0 - unit(rng));  // (0, gamma]
    out.push_back(subspace_at_angle(l_star, std::min(angle, gamma), rng));
  }
  return out;
}

StabilityReport stability(const Dataset& data, double gamma, int n_samples, std::uint64_t seed) {
  const Subspace& l_star = require_truth(data);
  require_gamma(gamma);
  if (n_samples < 0) throw ConfigError("n_samples must be non-negative");

  StabilityReport rep;
  Diagnostics diag;
  rep.gamma = gamma;
  rep.n_samples = n_samples;
  rep.seed = seed;
  rep.permeance = permeance(data.inliers, l_star, &diag);
  rep.alignment_at_center = alignment(data.outliers, l_star);
  rep.alignment_global_bound = alignment_global_bound(data.outliers);
  const std::vector<Subspace> samples = sample_ball(l_star, gamma, n_samples, seed);
  rep.alignment_sup_estimate = std::max(rep.alignment_at_center, max_alignment(data.outliers, samples));
  const double inlier_term = std::cos(gamma) * rep.permeance;
  rep.s_sampled = inlier_term - rep.alignment_sup_estimate;
  rep.s_global_lower = inlier_term - rep.alignment_global_bound;
  rep.warnings = diag.warnings;
  return rep;
}

NoisyStabilityReport noisy_stability(const Dataset& data, double epsilon, double delta, double gamma,
                                     int n_dir_samples, int n_sub_samples, std::uint64_t seed) {
  const Subspace& l_star = require_truth(data);
  require_gamma(gamma);
  if (!(epsilon > 0) || !(delta > epsilon))
    throw ConfigError("noisy_stability: need delta > epsilon > 0");
  const double eta = 2.0 * std::atan(epsilon / delta);
  if (!(eta < gamma)) throw ConfigError("noisy_stability: eta = 2 atan(epsilon/delta) must be < gamma");
  if (n_dir_samples < 1) throw ConfigError("noisy_stability: need at least one direction sample");

  NoisyStabilityReport rep;
  rep.epsilon = epsilon;
  rep.delta = delta;
  rep.gamma = gamma;
  rep.eta = eta;
  rep.n_direction_samples = n_dir_samples;
  rep.n_subspace_samples = n_sub_samples;
  rep.seed = seed;

  const Eigen::Index d = l_star.dim();
  const Matrix coords = l_star.basis().transpose() * data.inliers;  // d x N_in, w^T x = c_w^T coords
  const Vector proj_norm = coords.colwise().norm().transpose();
  const double pad = std::hypot(epsilon, delta);

  // Directions w = V* g / ||g|| drawn from the stream reserved at index 0 of the seed.
  Rng dir_rng(derive_seed(seed, 0));
  double min_trimmed = std::numeric_limits<double>::infinity();
  Eigen::Index max_small = 0;
  for (int s = 0; s < n_dir_samples; ++s) {
    Vector g = gaussian_matrix(d, 1, dir_rng);
    g /= g.norm();
    const Vector along = coords.transpose() * g;  // w^T x_i for every inlier
    double trimmed = 0.0;
    Eigen::Index small = 0;
    for (Eigen::Index i = 0; i < along.size(); ++i) {
      if (std::abs(along(i)) > delta)
        trimmed += along(i) * along(i) / (proj_norm(i) + pad);
      else
        ++small;
    }
    min_trimmed = std::min(min_trimmed, trimmed);
    max_small = std::max(max_small, small);
  }
  rep.trimmed_permeance_term = std::cos(gamma - eta) / 2.0 * min_trimmed;
  rep.small_projection_term = pad * static_cast<double>(max_small);

  const std::vector<Subspace> samples =
      sample_ball(l_star, gamma, n_sub_samples, derive_seed(seed, 1));
  rep.alignment_sup_estimate =
      std::max(alignment(data.outliers, l_star), max_alignment(data.outliers, samples));
  rep.s_n = rep.trimmed_permeance_term - rep.small_projection_term - rep.alignment_sup_estimate;
  return rep;
}

PcaInitCondition pca_init_condition(const Dataset& data, double gamma) {
  const Subspace& l_star = require_truth(data);
  const Eigen::Index d = l_star.dim();
  double lambda_d = 0.0;
  if (data.n_in() >= d) {
    Eigen::BDCSVD<Matrix> svd(data.inliers);
    const double sv = svd.singularValues()(d - 1);
    lambda_d = sv * sv;
  }
  const double out_norm = spectral_norm(data.outliers);
  PcaInitCondition out;
  out.lhs = std::numbers::sqrt2 * std::sin(gamma) * lambda_d - out_norm * out_norm;
  out.holds = out.lhs > 0;
  return out;
}

PointsOnSubspace points_on_subspace(const PointSet& points, const Subspace& l, double tol) {
  PointsOnSubspace out;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const Vector x = points.col(i);
    if (l.residual(x).norm() <= tol * x.norm()) out.indices.push_back(i);
  }
  out.count = static_cast<Eigen::Index>(out.indices.size());
  return out;
}

StrongGradientCheck strong_gradient_check(const Dataset& data, double gamma, int n_samples,
                                          double tol_on, std::uint64_t seed) {
  const Subspace& l_star = require_truth(data);
  require_gamma(gamma);
  if (n_samples < 1) throw ConfigError("strong_gradient_check: need at least one sample");
  const PointSet points = data.all();
  const std::vector<Subspace> samples = sample_ball(l_star, gamma, n_samples, seed);

  std::vector<double> derivative(samples.size());
  std::vector<double> on_mass(samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t s = 0; s < samples.size(); ++s) {
    derivative[s] = std::abs(special_geodesic_derivative(samples[s], l_star, points));
    const PointsOnSubspace on = points_on_subspace(points, samples[s], tol_on);
    double mass = 0.0;
    for (Eigen::Index i : on.indices) mass += 2.0 * points.col(i).norm();
    on_mass[s] = mass;
  }
  StrongGradientCheck out;
  out.lhs_estimate = 0.25 * *std::min_element(derivative.begin(), derivative.end());
  out.rhs = *std::max_element(on_mass.begin(), on_mass.end());
  out.holds = out.lhs_estimate > out.rhs;
  return out;
}

}  // namespace rsr
