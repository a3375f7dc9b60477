#include <gtest/gtest.h>

#include <cmath>

#include "lsdp/distributions.hpp"
#include "lsdp/families.hpp"

using namespace lsdp;

TEST(Families, CMatrix) {
  EXPECT_TRUE(c_matrix(4, 1.0).isIdentity(0.0));
  EXPECT_TRUE((c_matrix(3, 0.0).array() == 1.0).all());
  const Matrix c = c_matrix(3, 0.5);
  EXPECT_EQ(c(0, 1), 0.25);
  EXPECT_EQ(c(2, 0), 0.25);
  EXPECT_EQ(c(1, 1), 1.0);
  EXPECT_THROW(c_matrix(3, 1.01), std::invalid_argument);
}

TEST(Families, QIsProjector) {
  for (std::size_t d : {2u, 3u, 7u}) {
    const Matrix q = q_matrix(d);
    EXPECT_LE((q * q - q).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(asymmetry(q), 0.0);
    EXPECT_EQ(numerical_rank(q), d - 1);
  }
}

TEST(Families, CovarianceRoutes) {
  for (std::size_t m : {2u, 3u}) {
    for (std::size_t d : {2u, 3u, 4u}) {
      for (double p : {0.0, 0.3, 0.77, 1.0}) {
        const auto dist = family_pmd(m, d, p);
        const auto direct =
            covariance_from_distribution(dist, orthonormal_feature_map(dist.alphabet_sizes()));
        EXPECT_LE((family_covariance(m, d, p).matrix - direct.matrix).cwiseAbs().maxCoeff(),
                  1e-12);
      }
    }
  }
}

TEST(Families, BlockDiagonalAtOne) {
  const auto cov = family_covariance(3, 3, 1.0);
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t mp = 0; mp < 3; ++mp) {
      const Matrix expect = m == mp ? Matrix(q_matrix(3) / 3.0) : Matrix::Zero(3, 3);
      EXPECT_LE((cov.block(m, mp) - expect).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(Families, BipartiteMarginConsistent) {
  const double p = 0.4;
  const std::size_t d = 3;
  const auto cov3 = family_covariance(3, d, p);
  const auto cov2 = family_covariance(2, d, p);
  EXPECT_LE((cov3.matrix.topLeftCorner(6, 6) - cov2.matrix).cwiseAbs().maxCoeff(), 1e-15);
  // Cross block from the pair marginal (1-p)^2 delta / D + p(2-p) / D^2.
  EXPECT_NEAR(cov2.block(0, 1)(0, 0), (1 - p) * (1 - p) / d * (1 - 1.0 / d), 1e-15);
}

TEST(Families, Threshold) {
  EXPECT_NEAR(triangle_threshold(), 0.29289321881345248, 1e-16);
  const double t = triangle_threshold();
  EXPECT_NEAR(min_eigenvalue(triangle_pair_matrix(t)), 0.0, 1e-15);
  EXPECT_LT(min_eigenvalue(triangle_pair_matrix(0.29)), 0.0);
  EXPECT_TRUE(triangle_pair_psd(t));
  EXPECT_FALSE(triangle_pair_psd(0.29));
  EXPECT_TRUE(triangle_pair_psd(1.0));
}
