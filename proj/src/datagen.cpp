#include "rsr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rsr {

PointSet Dataset::all() const {
  PointSet out(ambient_dim(), n_in() + n_out());
  if (n_in() > 0) out.leftCols(n_in()) = inliers;
  if (n_out() > 0) out.rightCols(n_out()) = outliers;
  return out;
}

Dataset haystack(const HaystackParams& p, Rng& rng) {
  if (p.dim < 1 || p.dim >= p.ambient) throw ConfigError("haystack: need 1 <= d < D");
  if (p.n_in < 0 || p.n_out < 0) throw ConfigError("haystack: counts must be non-negative");
  if (!(p.sigma_in > 0) || !(p.sigma_out > 0)) throw ConfigError("haystack: sigmas must be positive");

  Dataset data;
  data.l_star = random_subspace(p.ambient, p.dim, rng);
  const double in_scale = p.sigma_in / std::sqrt(static_cast<double>(p.dim));
  const double out_scale = p.sigma_out / std::sqrt(static_cast<double>(p.ambient));
  data.inliers = data.l_star->basis() * (in_scale * gaussian_matrix(p.dim, p.n_in, rng));
  data.outliers = out_scale * gaussian_matrix(p.ambient, p.n_out, rng);
  data.meta = {{"model", "haystack"},
               {"D", p.ambient},
               {"d", p.dim},
               {"n_in", p.n_in},
               {"n_out", p.n_out},
               {"sigma_in", p.sigma_in},
               {"sigma_out", p.sigma_out}};
  return data;
}

Eigen::Index psd_rank(const Matrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0)) return 0;
  return (ev.array() > 1e-10 * top).count();
}

Dataset generalized_haystack(const GeneralizedHaystackParams& p, Eigen::Index ambient, Rng& rng) {
  const Eigen::Index d = p.lambda_in.size();
  if (d < 1 || d >= ambient) throw ConfigError("generalized_haystack: need 1 <= d < D");
  if ((p.lambda_in.array() <= 0).any())
    throw ConfigError("generalized_haystack: Lambda_in entries must be positive");
  if (p.sigma_out.rows() != ambient || p.sigma_out.cols() != ambient)
    throw ConfigError("generalized_haystack: Sigma_out must be D x D");
  if ((p.sigma_out - p.sigma_out.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, p.sigma_out.cwiseAbs().maxCoeff()))
    throw ConfigError("generalized_haystack: Sigma_out must be symmetric");
  if (p.n_in < 0 || p.n_out < 0) throw ConfigError("generalized_haystack: negative count");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(p.sigma_out);
  const Vector& ev = eig.eigenvalues();
  if (ev.minCoeff() < -1e-10) throw ConfigError("generalized_haystack: Sigma_out is not PSD");
  const Eigen::Index d_out = psd_rank(p.sigma_out);
  if (p.n_out > 0 && d_out == 0) throw ConfigError("generalized_haystack: Sigma_out is zero");

  Dataset data;
  data.l_star = random_subspace(ambient, d, rng);
  const Matrix in_factor = data.l_star->basis() * p.lambda_in.cwiseSqrt().asDiagonal() /
                           std::sqrt(static_cast<double>(d));
  data.inliers = in_factor * gaussian_matrix(d, p.n_in, rng);

  // Sigma_out / D_out = F F^T with F = E sqrt(max(lambda, 0)) / sqrt(D_out).
  const Vector root = ev.cwiseMax(0.0).cwiseSqrt();
  const double denom = std::sqrt(static_cast<double>(std::max<Eigen::Index>(d_out, 1)));
  const Matrix out_factor = eig.eigenvectors() * root.asDiagonal() / denom;
  data.outliers = out_factor * gaussian_matrix(ambient, p.n_out, rng);

  std::vector<double> lambda(p.lambda_in.data(), p.lambda_in.data() + d);
  data.meta = {{"model", "generalized_haystack"}, {"D", ambient},        {"d", d},
               {"n_in", p.n_in},                  {"n_out", p.n_out},    {"lambda_in", lambda},
               {"D_out", d_out}};
  return data;
}

PointSet bounded_uniform_outliers(Eigen::Index n_out, double radius, Eigen::Index ambient, Rng& rng) {
  if (!(radius > 0)) throw ConfigError("bounded_uniform_outliers: radius must be positive");
  if (ambient < 1 || n_out < 0) throw ConfigError("bounded_uniform_outliers: bad shape");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointSet out = gaussian_matrix(ambient, n_out, rng);
  for (Eigen::Index i = 0; i < n_out; ++i) {
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(ambient));
    out.col(i) *= r / out.col(i).norm();
  }
  return out;
}

Dataset add_noise(const Dataset& data, double epsilon, Rng& rng) {
  if (!data.l_star) throw ConfigError("add_noise: dataset has no ground truth");
  if (!(epsilon > 0)) throw ConfigError("add_noise: epsilon must be positive");
  const Subspace& l_star = *data.l_star;
  if (l_star.dim() == l_star.ambient_dim())
    throw ConfigError("add_noise: L* has no orthogonal complement");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset out = data;
  for (Eigen::Index i = 0; i < out.n_in(); ++i) {
    Vector dir;
    do {
      dir = l_star.residual(Vector(gaussian_matrix(l_star.ambient_dim(), 1, rng)));
    } while (dir.norm() < 1e-8);
    dir = l_star.residual(dir);
    out.inliers.col(i) += (epsilon * unit(rng) / dir.norm()) * dir;
  }
  out.noise_epsilon = epsilon;
  out.meta["noise_epsilon"] = epsilon;
  out.meta["noise_model"] = "uniform_magnitude_orthogonal";
  return out;
}

double snr(const Dataset& data) {
  if (data.n_out() == 0) throw ConfigError("SNR undefined: dataset has no outliers");
  return static_cast<double>(data.n_in()) / static_cast<double>(data.n_out());
}

double snr_threshold(SnrRegime regime, double sigma_in, double sigma_out, Eigen::Index ambient,
                     Eigen::Index dim) {
  if (dim < 1 || dim >= ambient) throw ConfigError("snr_threshold: need 1 <= d < D");
  const double ratio = sigma_out / sigma_in;
  const double big_d = static_cast<double>(ambient);
  const double d = static_cast<double>(dim);
  const double pca_term = 2.0 * ratio * ratio * d / big_d;
  const double stability_term =
      regime == SnrRegime::SmallSample
          ? 8.0 * std::numbers::sqrt2 * ratio * d / std::sqrt(big_d)
          : 5.0 * std::numbers::sqrt2 * ratio * d / std::sqrt(big_d * (big_d - d));
  return std::max(stability_term, pca_term);
}

}  // namespace rsr
