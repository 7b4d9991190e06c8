#pragma once

#include <cstdint>
#include <vector>

#include "rsr/common.hpp"
#include "rsr/datagen.hpp"
#include "rsr/energy.hpp"
#include "rsr/grassmann.hpp"

namespace rsr {

/// Landscape statistics over the ball B(L*, gamma). Fields named *_estimate or
/// s_sampled come from Monte Carlo sampling; s_global_lower is a certified bound.
struct StabilityReport {
  double permeance = 0.0;
  double alignment_at_center = 0.0;
  double alignment_sup_estimate = 0.0;
  double alignment_global_bound = 0.0;
  double gamma = 0.0;
  double s_sampled = 0.0;       // cos(gamma) P - alignment_sup_estimate
  double s_global_lower = 0.0;  // cos(gamma) P - alignment_global_bound
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

struct NoisyStabilityReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;  // 2 atan(epsilon / delta)
  double trimmed_permeance_term = 0.0;
  double small_projection_term = 0.0;
  double alignment_sup_estimate = 0.0;
  double s_n = 0.0;
  int n_direction_samples = 0;
  int n_subspace_samples = 0;
  std::uint64_t seed = 0;
};

/// lambda_d of sum_i x_i x_i^T / ||x_i|| restricted to L*.
double permeance(const PointSet& inliers, const Subspace& l_star, Diagnostics* diag = nullptr);

/// Spectral norm of sum over active outliers of (Q_L x / ||Q_L x||) x^T V.
double alignment(const PointSet& outliers, const Subspace& l, double tol_active = kDefaultActiveTol);

/// sqrt(N_out) * ||X_out||_2, an upper bound on the alignment at every L.
double alignment_global_bound(const PointSet& outliers);

/// The sampled neighbourhood used by the Monte Carlo estimates: n subspaces with
/// largest principal angle to l_star drawn Uniform(0, gamma], sample i generated
/// from derive_seed(seed, i).
std::vector<Subspace> sample_ball(const Subspace& l_star, double gamma, int n, std::uint64_t seed);

StabilityReport stability(const Dataset& data, double gamma, int n_samples, std::uint64_t seed);

NoisyStabilityReport noisy_stability(const Dataset& data, double epsilon, double delta, double gamma,
                                     int n_dir_samples, int n_sub_samples, std::uint64_t seed);

struct PcaInitCondition {
  double lhs = 0.0;  // sqrt(2) sin(gamma) lambda_d(X_in X_in^T) - ||X_out||_2^2
  bool holds = false;
};
PcaInitCondition pca_init_condition(const Dataset& data, double gamma);

struct PointsOnSubspace {
  Eigen::Index count = 0;
  std::vector<Eigen::Index> indices;
};
/// Points with ||Q_L x|| <= tol * ||x||. Zero points lie on every subspace.
PointsOnSubspace points_on_subspace(const PointSet& points, const Subspace& l, double tol);

struct StrongGradientCheck {
  double lhs_estimate = 0.0;  // (1/4) min over samples of |special geodesic derivative|
  double rhs = 0.0;           // max over samples of sum over points on L of 2 ||x||
  bool holds = false;
};
StrongGradientCheck strong_gradient_check(const Dataset& data, double gamma, int n_samples,
                                          double tol_on, std::uint64_t seed);

}  // namespace rsr
