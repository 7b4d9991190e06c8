#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rsr/grassmann.hpp"
#include "test_util.hpp"

using namespace rsr;
using test::coordinate_pair;

TEST_CASE("Subspace rejects bad bases") {
  CHECK_THROWS_AS(Subspace(Matrix::Ones(4, 2)), ConfigError);
  CHECK_THROWS_AS(Subspace(Matrix::Identity(2, 3)), ConfigError);
  CHECK_THROWS_AS(Subspace(Matrix(4, 0)), ConfigError);
  Matrix nan = Matrix::Identity(4, 2);
  nan(3, 1) = std::nan("");
  CHECK_THROWS_AS(Subspace{nan}, NumericError);
  CHECK_NOTHROW(Subspace(Matrix::Identity(4, 2)));
}

TEST_CASE("principal angles of a constructed pair") {
  // L0 = span(e_0..e_{d-1}); L1 spanned by cos(a_j) e_j + sin(a_j) e_{d+j}.
  const std::vector<double> angles = {0.1, 1.2, 0.0, 1e-9, std::numbers::pi / 2};
  const auto [l0, l1] = coordinate_pair(12, angles);
  const PrincipalDecomposition pd = principal_decomposition(l0, l1);
  std::vector<double> sorted = angles;
  std::sort(sorted.rbegin(), sorted.rend());
  REQUIRE(pd.angles.size() == 5);
  for (int j = 0; j < 5; ++j) {
    const double want = sorted[static_cast<std::size_t>(j)];
    // Small angles must keep relative accuracy, not only absolute.
    CHECK(std::abs(pd.angles(j) - want) <= 1e-14 + 1e-8 * want);
  }
  CHECK(pd.interaction_dim == 4);
  CHECK(theta1(l0, l1) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
}

TEST_CASE("principal vectors satisfy their defining relations") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Subspace l0 = random_subspace(15, 4, rng);
    const Subspace l1 = subspace_at_angle(l0, 0.3 + 0.05 * rep, rng);
    const PrincipalDecomposition pd = principal_decomposition(l0, l1);
    const Matrix& v = pd.left_vectors;
    const Matrix& y = pd.right_vectors;
    const Matrix& u = pd.complementary;
    const Eigen::Index k = pd.interaction_dim;
    CHECK((v.transpose() * v - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((y.transpose() * y - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(l0.residual(Matrix(v)).norm() < 1e-12);
    CHECK(l1.residual(Matrix(y)).norm() < 1e-12);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(v.col(j).dot(y.col(j)) == doctest::Approx(std::cos(pd.angles(j))));
    REQUIRE(u.cols() == k);
    CHECK((u.transpose() * u - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((l0.basis().transpose() * u).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Vector rebuilt = std::cos(pd.angles(j)) * v.col(j) + std::sin(pd.angles(j)) * u.col(j);
      CHECK((rebuilt - y.col(j)).norm() < 1e-10);
    }
  }
}

TEST_CASE("theta1 is a metric invariant to the choice of basis") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Subspace a = random_subspace(10, 3, rng);
    const Subspace b = random_subspace(10, 3, rng);
    const Subspace c = random_subspace(10, 3, rng);
    const Subspace a_rot(a.basis() * random_rotation(3, rng));
    CHECK(theta1(a, b) == doctest::Approx(theta1(b, a)).epsilon(1e-12));
    CHECK(theta1(a_rot, b) == doctest::Approx(theta1(a, b)).epsilon(1e-12));
    CHECK(theta1(a, a_rot) < 1e-7);
    CHECK(theta1(a, c) <= theta1(a, b) + theta1(b, c) + 1e-12);
    // Independent route: sin(theta_1) is the spectral norm of Q_a B.
    const double sine = spectral_norm(a.residual(b.basis()));
    CHECK(std::sin(theta1(a, b)) == doctest::Approx(sine).epsilon(1e-10));
  }
}

TEST_CASE("geodesic endpoints and arclength") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const Subspace l0 = random_subspace(12, 3, rng);
    const Subspace l1 = subspace_at_angle(l0, 0.2 + 0.04 * rep, rng);
    const PrincipalDecomposition pd = principal_decomposition(l0, l1);
    CHECK(theta1(geodesic(l0, l1, 0.0), l0) < 1e-8);
    CHECK(theta1(geodesic(l0, l1, 1.0), l1) < 1e-8);
    for (double t : {0.25, 0.5, 0.8}) {
      const PrincipalDecomposition mid = principal_decomposition(l0, geodesic(l0, l1, t));
      for (Eigen::Index j = 0; j < 3; ++j) CHECK(mid.angles(j) == doctest::Approx(t * pd.angles(j)).epsilon(1e-8));
    }
  }
}

TEST_CASE("geodesic refuses orthogonal directions") {
  const auto [l0, l1] = coordinate_pair(6, {std::numbers::pi / 2, 0.2});
  CHECK_THROWS_AS(geodesic(l0, l1, 0.5), NumericError);
}

TEST_CASE("geodesic_step along the principal tangent reaches the target") {
  Rng rng(9);
  const Subspace l0 = random_subspace(10, 3, rng);
  const Subspace l1 = subspace_at_angle(l0, 0.6, rng);
  const PrincipalDecomposition pd = principal_decomposition(l0, l1);
  // Tangent H = sum_j theta_j u_j (V^T v_j)^T; the step uses -G, so G = -H.
  Matrix h = Matrix::Zero(10, 3);
  for (Eigen::Index j = 0; j < pd.interaction_dim; ++j)
    h += pd.angles(j) * pd.complementary.col(j) * (l0.basis().transpose() * pd.left_vectors.col(j)).transpose();
  CHECK(theta1(geodesic_step(l0, -h, 1.0), l1) < 1e-10);
  CHECK(theta1(geodesic_step(l0, -h, 0.5), geodesic(l0, l1, 0.5)) < 1e-10);
  CHECK(geodesic_step(l0, -h, 0.0).basis() == l0.basis());
  CHECK_THROWS_AS(geodesic_step(l0, Matrix::Zero(9, 3), 1.0), ConfigError);
}

TEST_CASE("random constructions") {
  Rng rng(1);
  const Subspace s = random_subspace(30, 4, rng);
  CHECK((s.basis().transpose() * s.basis() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix r = random_rotation(5, rng);
  CHECK((r.transpose() * r - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  for (double gamma : {1e-6, 0.3, 1.5}) CHECK(theta1(s, subspace_at_angle(s, gamma, rng)) == doctest::Approx(gamma).epsilon(1e-9));
  CHECK_THROWS_AS(subspace_at_angle(s, 0.0, rng), ConfigError);
  CHECK_THROWS_AS(subspace_at_angle(s, 2.0, rng), ConfigError);
  CHECK_THROWS_AS(subspace_at_angle(Subspace(Matrix::Identity(4, 4)), 0.3, rng), ConfigError);

  Rng a(42), b(42);
  CHECK(random_subspace(8, 2, a).basis() == random_subspace(8, 2, b).basis());
}

TEST_CASE("orthonormalize keeps the span") {
  Rng rng(2);
  const Matrix m = gaussian_matrix(9, 3, rng);
  const Subspace s = orthonormalize(m);
  CHECK(s.residual(m).norm() < 1e-12 * m.norm());
  Matrix deficient = m;
  deficient.col(2) = deficient.col(0) + deficient.col(1);
  CHECK_THROWS_AS(orthonormalize(deficient), NumericError);
}
