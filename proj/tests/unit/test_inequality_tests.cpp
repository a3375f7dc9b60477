#include <gtest/gtest.h>

#include <cmath>

#include "lsdp/distributions.hpp"
#include "lsdp/experiments.hpp"
#include "lsdp/families.hpp"
#include "lsdp/inequality_tests.hpp"
#include "lsdp/latent_model.hpp"
#include "lsdp/rng.hpp"

using namespace lsdp;

TEST(PhiMap, BlockDiagonalStaysPsd) {
  const BlockPartition part({2, 1, 2});
  Matrix q = Matrix::Zero(5, 5);
  q.topLeftCorner(2, 2) << 2, 1, 1, 2;
  q(2, 2) = 1.0;
  q.bottomRightCorner(2, 2) << 1, 0.5, 0.5, 1;
  for (std::size_t d : {1u, 2u, 3u}) {
    const Matrix out = phi_map(q, d, part);
    EXPECT_GE(min_eigenvalue(out), -1e-15);
    EXPECT_EQ((out.topLeftCorner(2, 2) - double(d - 1) * q.topLeftCorner(2, 2)).norm(), 0.0);
  }
}

TEST(PhiMap, AllOnesCounterexample) {
  const Matrix out = phi_map(Matrix::Ones(3, 3), 2, BlockPartition::uniform(3, 1));
  Matrix expect(3, 3);
  expect << 1, 1, 1, 1, 1, 0, 1, 0, 1;
  EXPECT_EQ((out - expect).norm(), 0.0);
  EXPECT_NEAR(out.determinant(), -1.0, 1e-14);
  EXPECT_LT(min_eigenvalue(out), 0.0);
  EXPECT_FALSE(operator_inequality_test(Matrix::Ones(3, 3), 2, BlockPartition::uniform(3, 1)).pass);
}

TEST(PhiMap, Linear) {
  CounterRng rng(1, 0);
  const BlockPartition part({1, 2, 2});
  Matrix a(5, 5), b(5, 5);
  for (Index i = 0; i < 25; ++i) {
    a.data()[i] = rng.normal();
    b.data()[i] = rng.normal();
  }
  for (std::size_t dist = 0; dist < 3; ++dist) {
    const Matrix lhs = phi_map(2.5 * a - 0.75 * b, 3, part, dist);
    const Matrix rhs = 2.5 * phi_map(a, 3, part, dist) - 0.75 * phi_map(b, 3, part, dist);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(phi_map(a, 0, part), std::invalid_argument);
  EXPECT_THROW(phi_map(a, 2, BlockPartition::uniform(2, 2)), std::invalid_argument);
}

TEST(PhiMap, SignFlipAverage) {
  CounterRng rng(2, 0);
  const BlockPartition part({2, 2, 2});
  const auto model = random_latent_model(triangle_dag(), rng);
  const Matrix q = model_covariance(model).matrix;
  const BlockPartition p2 = model.features.partition();
  // Averaging the two signs of block (1,2) zeroes it; with d = 2 and block 3
  // distinguished the phi map does the same.
  const Matrix avg = 0.5 * (q + sign_flip(q, p2, 0, 1));
  EXPECT_LE((avg - phi_map(q, 2, p2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  (void)part;
}

TEST(OperatorInequality, Examples) {
  const Matrix diag = Eigen::Vector4d(1, 2, 3, 4).asDiagonal();
  for (std::size_t d : {1u, 2u, 5u}) {
    EXPECT_TRUE(operator_inequality_test(diag, d, BlockPartition::uniform(2, 2)).pass);
  }
  const auto fam = family_covariance(3, 2, 0.1);
  EXPECT_FALSE(operator_inequality_test(fam.matrix, 2, fam.partition).pass);
}

TEST(OperatorInequality, TriangleModelsPass) {
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = random_latent_model(triangle_dag(), rng);
    const auto cov = model_covariance(model);
    const auto r = operator_inequality_test(cov.matrix, 2, cov.partition);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.min_eigenvalues.size(), 3u);
  }
}

TEST(Entropy, ProfileExamples) {
  const auto u = entropy_profile(DiscreteDistribution::uniform({2, 2, 2}));
  EXPECT_NEAR(u.single[0], 1.0, 1e-15);
  EXPECT_NEAR(u.h12, 2.0, 1e-15);
  EXPECT_NEAR(u.h123, 3.0, 1e-15);

  const auto c = entropy_profile(perfectly_correlated(3, 2));
  for (double h : {c.single[0], c.single[1], c.single[2], c.h12, c.h13, c.h23, c.h123}) {
    EXPECT_NEAR(h, 1.0, 1e-15);
  }

  // Values from an exact summation of the closed-form table.
  const auto f = entropy_profile(family_pmd(3, 2, 0.5));
  EXPECT_NEAR(f.single[2], 1.0, 1e-15);
  EXPECT_NEAR(f.h13, 1.9544340029249647, 1e-14);
  EXPECT_NEAR(f.h123, 2.880240814944148, 1e-14);
  EXPECT_THROW(entropy_profile(DiscreteDistribution::uniform({2, 2})), std::invalid_argument);
}

TEST(Entropy, ProfileInvariants) {
  CounterRng rng(4, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(12);
    double s = 0.0;
    for (auto& v : p) s += (v = rng.uniform());
    for (auto& v : p) v /= s;
    const DiscreteDistribution d({2, 3, 2}, p);
    const auto h = entropy_profile(d);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_GE(h.single[i], 0.0);
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) continue;
        EXPECT_GE(h.pair(i, j) + 1e-12, h.single[i]);
        EXPECT_GE(h.h123 + 1e-12, h.pair(i, j));
      }
    }
    // Submodularity: H(12) + H(13) >= H(123) + H(1).
    EXPECT_GE(h.h12 + h.h13 + 1e-12, h.h123 + h.single[0]);

    // Relabeling outcomes within a variable leaves all values unchanged.
    std::vector<double> q(12);
    for (std::size_t i = 0; i < 12; ++i) {
      auto x = d.outcome(i);
      x[1] = (x[1] + 1) % 3;
      q[d.flat_index(x)] = p[i];
    }
    const auto a = entropic_tests(h).all();
    const auto b = entropic_tests(entropy_profile(DiscreteDistribution({2, 3, 2}, q))).all();
    for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Entropic, IndependentProductPasses) {
  const auto d = DiscreteDistribution::product({{0.3, 0.7}, {0.5, 0.5}, {0.1, 0.9}});
  const auto h = entropy_profile(d);
  const auto v = entropic_tests(h);
  EXPECT_NEAR(v.e1[0], h.single[0], 1e-14);
  EXPECT_FALSE(entropic_rejections(v).combined());
}

TEST(Entropic, FamilyValuesAtHalf) {
  const auto v = family_entropic_values(2, 0.5);
  const double expect[6] = {0.9088680058499294, 1.8007972055306056, 2.6927264052112827,
                            1.7838583993613506, 0.0689427665480924, 2.6419099867035225};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(v.e1[i], expect[0], 1e-13);
    EXPECT_NEAR(v.e2[i], expect[1], 1e-13);
    EXPECT_NEAR(v.e4[i], expect[3], 1e-13);
  }
  EXPECT_NEAR(v.e3, expect[2], 1e-13);
  EXPECT_NEAR(v.e5, expect[4], 1e-13);
  EXPECT_NEAR(v.e6, expect[5], 1e-13);
}

TEST(Entropic, E1Endpoints) {
  for (std::size_t d : {2u, 3u, 4u, 8u}) {
    const double ld = std::log2(double(d));
    EXPECT_NEAR(family_entropic_values(d, 0.0).e1[0], -ld, 1e-10);
    EXPECT_NEAR(family_entropic_values(d, 1.0).e1[1], ld, 1e-10);
    EXPECT_NEAR(e1_family_closed_form(0.0, double(d)), -ld, 1e-12);
    EXPECT_NEAR(e1_family_closed_form(1.0, double(d)), ld, 1e-12);
  }
}

TEST(Entropic, ClosedFormMatchesProfile) {
  for (std::size_t d : {2u, 3u, 5u, 8u}) {
    for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.05) {
      const double pp = std::min(p, 1.0);
      EXPECT_NEAR(e1_family_closed_form(pp, double(d)), family_entropic_values(d, pp).e1[2],
                  1e-10)
          << d << " " << pp;
    }
  }
  EXPECT_THROW(e1_family_closed_form(1.5, 2), std::invalid_argument);
  EXPECT_THROW(e1_family_closed_form(0.5, 1), std::invalid_argument);
}

TEST(Entropic, ThresholdValue) {
  EXPECT_NEAR(e1_family_closed_form(triangle_threshold(), 2), 1.5 * std::log2(4.0 / 3.0), 1e-14);
  EXPECT_NEAR(1.5 * std::log2(4.0 / 3.0), 0.6225562489182657, 1e-15);
}

TEST(Entropic, E1Increasing) {
  for (double d : {2.0, 5.0, 64.0}) {
    double prev = e1_family_closed_form(0.0, d);
    for (int i = 1; i <= 1000; ++i) {
      const double cur = e1_family_closed_form(i / 1000.0, d);
      EXPECT_GE(cur, prev - 1e-13);
      prev = cur;
    }
  }
}

TEST(Entropic, Roots) {
  // Reference roots from 40-digit bisection of the same closed form.
  EXPECT_NEAR(e1_root(2), 0.1168554641944044, 1e-9);
  EXPECT_NEAR(e1_root(3), 0.1277570620877699, 1e-9);
  EXPECT_NEAR(e1_root(4), 0.1353533476347939, 1e-9);
  EXPECT_NEAR(e1_root(8), 0.1528342875180004, 1e-9);
  EXPECT_NEAR(e1_root(1e7), 0.2632660580378290, 1e-9);
  double prev = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double r = e1_root(std::ldexp(1.0, k));
    EXPECT_GT(r, prev);
    EXPECT_LT(r, triangle_threshold());
    prev = r;
  }
}

TEST(Entropic, IndependentUniformLargeAlphabet) {
  // E5 vanishes exactly here; 64000 cells must not round below the reject tolerance.
  const auto v = family_entropic_values(40, 1.0);
  EXPECT_NEAR(v.e5, 0.0, 1e-12);
  EXPECT_FALSE(entropic_rejections(v).combined());
}
