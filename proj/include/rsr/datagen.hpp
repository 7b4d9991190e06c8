#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "rsr/common.hpp"
#include "rsr/grassmann.hpp"

namespace rsr {

/// Labeled inlier/outlier points with optional ground truth.
struct Dataset {
  PointSet inliers;   // D x N_in
  PointSet outliers;  // D x N_out
  std::optional<Subspace> l_star;
  std::optional<double> noise_epsilon;
  nlohmann::json meta = nlohmann::json::object();  // generator name, parameters, seed

  Eigen::Index ambient_dim() const {
    return inliers.cols() > 0 ? inliers.rows() : outliers.rows();
  }
  Eigen::Index n_in() const { return inliers.cols(); }
  Eigen::Index n_out() const { return outliers.cols(); }
  /// Inliers first, then outliers.
  PointSet all() const;
};

struct HaystackParams {
  Eigen::Index n_in = 200;
  Eigen::Index n_out = 200;
  double sigma_in = 1.0;
  double sigma_out = 1.0;
  Eigen::Index ambient = 100;  // D
  Eigen::Index dim = 5;        // d
};

struct GeneralizedHaystackParams {
  Eigen::Index n_in = 0;
  Vector lambda_in;  // diagonal of Lambda_in, length d, entries > 0
  Eigen::Index n_out = 0;
  Matrix sigma_out;  // D x D, symmetric PSD
};

/// Inliers ~ N(0, sigma_in^2 P_L* / d), outliers ~ N(0, sigma_out^2 I / D), L* uniform.
Dataset haystack(const HaystackParams& p, Rng& rng);

/// Inliers ~ N(0, V* Lambda_in V*^T / d), outliers ~ N(0, Sigma_out / D_out) with
/// D_out the numerical rank of Sigma_out.
Dataset generalized_haystack(const GeneralizedHaystackParams& p, Eigen::Index ambient, Rng& rng);

/// Numerical rank of a PSD matrix: eigenvalues above 1e-10 * lambda_max.
Eigen::Index psd_rank(const Matrix& sigma);

/// i.i.d. uniform points in the ball B(0, radius) of R^D.
PointSet bounded_uniform_outliers(Eigen::Index n_out, double radius, Eigen::Index ambient, Rng& rng);

/// Adds to each inlier a perturbation in the orthogonal complement of L* with norm
/// Uniform(0, epsilon).
Dataset add_noise(const Dataset& data, double epsilon, Rng& rng);

/// N_in / N_out.
double snr(const Dataset& data);

enum class SnrRegime { SmallSample, LargeSample };

/// Haystack SNR sufficient for recovery at gamma = pi/4 with PCA initialization.
double snr_threshold(SnrRegime regime, double sigma_in, double sigma_out, Eigen::Index ambient,
                     Eigen::Index dim);

}  // namespace rsr
