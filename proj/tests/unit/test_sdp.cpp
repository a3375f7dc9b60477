#include <gtest/gtest.h>

#include <cmath>

#include "lsdp/families.hpp"
#include "lsdp/latent_model.hpp"
#include "lsdp/rng.hpp"
#include "lsdp/sdp.hpp"

using namespace lsdp;

namespace {

Matrix random_sym(CounterRng& rng, Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return symmetrize(m);
}

StructuredVariable random_variable(CounterRng& rng, const StructureLayout& layout) {
  StructuredVariable z = zero_variable(layout);
  for (auto& m : z.r) m = random_sym(rng, m.rows());
  for (auto& m : z.c) m = random_sym(rng, m.rows());
  return z;
}

BlockCovariance family_cov(std::size_t d, double p) { return family_covariance(3, d, p); }

}  // namespace

TEST(ConstraintMap, ZeroAndBlockDiagonal) {
  const StructureLayout layout(triangle_dag(), BlockPartition::uniform(3, 2));
  EXPECT_EQ(constraint_map(zero_variable(layout), layout).norm(), 0.0);

  CounterRng rng(1, 0);
  const BipartiteDag none(3, {});
  const BlockPartition part({1, 2, 3});
  const StructureLayout l0(none, part);
  auto z = random_variable(rng, l0);
  const Matrix a = constraint_map(z, l0);
  for (std::size_t m = 0; m < 3; ++m) {
    const auto o = static_cast<Index>(part.offset(m));
    const auto d = static_cast<Index>(part.dim(m));
    EXPECT_EQ((a.block(o, o, d, d) - z.r[m]).norm(), 0.0);
  }
  EXPECT_DOUBLE_EQ(a.norm() * a.norm(),
                   z.r[0].squaredNorm() + z.r[1].squaredNorm() + z.r[2].squaredNorm());
}

TEST(ConstraintMap, TriangleExplicitBlocks) {
  for (double p : {triangle_threshold(), 0.5, 0.8, 1.0}) {
    const double c = (1 - p) * (1 - p);
    const StructureLayout layout(triangle_dag(), BlockPartition::uniform(3, 1));
    StructuredVariable z = zero_variable(layout);
    for (auto& m : z.c) m << 0.5, c, c, 0.5;
    EXPECT_LE((constraint_map(z, layout) - c_matrix(3, p)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(AdjointMap, IdentityAndBlockDiagonal) {
  const BlockPartition part({2, 1, 2});
  const StructureLayout layout(triangle_dag(), part);
  const auto z = adjoint_map(Matrix::Identity(5, 5), layout);
  for (const auto& m : z.r) EXPECT_TRUE(m.isIdentity(0.0));
  for (const auto& m : z.c) EXPECT_TRUE(m.isIdentity(0.0));

  CounterRng rng(2, 0);
  Matrix x = Matrix::Zero(5, 5);
  for (std::size_t m = 0; m < 3; ++m) {
    const auto o = static_cast<Index>(part.offset(m));
    const auto d = static_cast<Index>(part.dim(m));
    x.block(o, o, d, d) = random_sym(rng, d);
  }
  const auto zx = adjoint_map(x, layout);
  // C_0 lives on blocks 1 and 2: rows {2, 3, 4}.
  Matrix expect = Matrix::Zero(3, 3);
  expect.block(0, 0, 1, 1) = x.block(2, 2, 1, 1);
  expect.block(1, 1, 2, 2) = x.block(3, 3, 2, 2);
  EXPECT_EQ((zx.c[0] - expect).norm(), 0.0);
}

TEST(AdjointMap, InnerProductIdentity) {
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dag = random_bipartite_dag(rng, 5, 4);
    std::vector<std::size_t> dims;
    for (std::size_t m = 0; m < dag.num_observables(); ++m) {
      dims.push_back(1 + static_cast<std::size_t>(rng.uniform() * 3));
    }
    const StructureLayout layout(dag, BlockPartition(dims));
    const auto z = random_variable(rng, layout);
    const Matrix x = random_sym(rng, static_cast<Index>(layout.dim()));
    EXPECT_NEAR(frobenius_inner(constraint_map(z, layout), x),
                inner_product(z, adjoint_map(x, layout)), 1e-10);
  }
}

TEST(AdjointMap, ShapeMismatch) {
  const StructureLayout layout(triangle_dag(), BlockPartition::uniform(3, 2));
  EXPECT_THROW(adjoint_map(Matrix::Zero(5, 5), layout), std::invalid_argument);
  auto z = zero_variable(layout);
  z.c.pop_back();
  EXPECT_THROW(constraint_map(z, layout), std::invalid_argument);
}

TEST(Compatibility, BlockDiagonalIsFeasible) {
  CounterRng rng(4, 0);
  const BlockPartition part({2, 2, 2});
  Matrix cov = Matrix::Zero(6, 6);
  for (Index m = 0; m < 3; ++m) {
    const Matrix a = random_sym(rng, 2);
    cov.block(2 * m, 2 * m, 2, 2) = a * a;
  }
  const BlockCovariance bc{part, cov};
  for (const auto& dag : {triangle_dag(), BipartiteDag(3, {}), global_confounder_dag(3)}) {
    const auto r = test_compatibility(bc, dag);
    ASSERT_EQ(r.verdict, Verdict::Feasible);
    EXPECT_TRUE(check_decomposition(*r.decomposition, bc, dag).valid);
  }
  const auto r = test_compatibility(bc, BipartiteDag(3, {}));
  EXPECT_LE((r.decomposition->remainder - cov).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Compatibility, TriangleFamily) {
  for (SolverKind solver : {SolverKind::Accelerated, SolverKind::Dykstra}) {
    const auto cov_ok = family_cov(2, 0.5);
    const auto ok = test_compatibility(cov_ok, triangle_dag(), {}, solver);
    ASSERT_EQ(ok.verdict, Verdict::Feasible) << to_string(solver);
    const auto check = check_decomposition(*ok.decomposition, cov_ok, triangle_dag());
    EXPECT_TRUE(check.valid) << check.failure;

    const auto cov_bad = family_cov(2, 0.2);
    const auto bad = test_compatibility(cov_bad, triangle_dag(), {}, solver);
    ASSERT_EQ(bad.verdict, Verdict::CertifiedInfeasible) << to_string(solver);
    EXPECT_NEAR(bad.witness->x.norm(), 1.0, 1e-12);
    EXPECT_TRUE(verify_witness(*bad.witness, cov_bad, triangle_dag()).valid);
  }
}

TEST(Compatibility, OracleModelsAreFeasible) {
  CounterRng rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dag = random_bipartite_dag(rng, 4, 3);
    const auto model = random_latent_model(dag, rng);
    const auto cov = model_covariance(model);
    const auto r = test_compatibility(cov, dag);
    ASSERT_EQ(r.verdict, Verdict::Feasible) << trial;
    EXPECT_TRUE(check_decomposition(*r.decomposition, cov, dag).valid);
  }
}

TEST(Compatibility, UncoveredEntriesAreInfeasible) {
  // Two correlated observables with no common latent.
  const BlockCovariance cov{BlockPartition::uniform(2, 1), c_matrix(2, 0.5)};
  const auto r = test_compatibility(cov, BipartiteDag(2, {}));
  ASSERT_EQ(r.verdict, Verdict::CertifiedInfeasible);
  EXPECT_TRUE(verify_witness(*r.witness, cov, BipartiteDag(2, {})).valid);
}

TEST(Compatibility, HyperedgeOrderDoesNotMatter) {
  const BipartiteDag a(3, {{1, 2}, {0, 2}, {0, 1}});
  const BipartiteDag b(3, {{0, 1}, {1, 2}, {0, 2}});
  for (double p : {0.1, 0.25, 0.35, 0.6}) {
    const auto cov = family_cov(3, p);
    EXPECT_EQ(test_compatibility(cov, a).verdict, test_compatibility(cov, b).verdict) << p;
  }
}

TEST(Compatibility, BudgetExhaustionIsUndecided) {
  Tolerances tol;
  tol.max_iterations = 2;
  tol.certificate_every = 1000;
  const auto r = test_compatibility(family_cov(2, 0.2929), triangle_dag(), tol);
  EXPECT_NE(r.verdict, Verdict::Feasible);
  if (r.verdict == Verdict::Undecided) {
    EXPECT_FALSE(r.witness.has_value());
    EXPECT_FALSE(r.decomposition.has_value());
  }
}

TEST(Compatibility, RejectsBadInput) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 0.5;
  EXPECT_THROW(test_compatibility({BlockPartition::uniform(3, 1), m}, triangle_dag()),
               std::invalid_argument);
  EXPECT_THROW(test_compatibility({BlockPartition::uniform(2, 1), Matrix::Identity(2, 2)},
                                  triangle_dag()),
               std::invalid_argument);
  Matrix neg = -Matrix::Identity(3, 3);
  EXPECT_THROW(test_compatibility({BlockPartition::uniform(3, 1), neg}, triangle_dag()),
               std::invalid_argument);
}

TEST(Witness, IdentityIsNotAWitness) {
  const auto cov = family_cov(2, 0.2);
  Witness w{Matrix::Identity(6, 6) / std::sqrt(6.0), 0.0, 0.0};
  EXPECT_FALSE(verify_witness(w, cov, triangle_dag()).valid);
}

TEST(Witness, HandBuiltTriangle) {
  // a = 1, b = -1: every 2x2 block [[1,-1],[-1,1]] is PSD and
  // tr(X C(0.2)) = 3 - 6 * 0.64 < 0.
  Matrix x = Matrix::Constant(3, 3, -1.0);
  x.diagonal().setOnes();
  x /= x.norm();
  const BlockCovariance cov{BlockPartition::uniform(3, 1), c_matrix(3, 0.2)};
  const auto check = verify_witness({x, 0.0, 0.0}, cov, triangle_dag());
  EXPECT_TRUE(check.valid);
  EXPECT_NEAR(check.gap, (3 - 6 * 0.64) / 3.0, 1e-15);
  EXPECT_NEAR(check.dual_min_eig, 0.0, 1e-15);
}

TEST(ReducedFamily, Examples) {
  EXPECT_EQ(reduced_family_test(1.0, triangle_dag()).verdict, Verdict::Feasible);
  EXPECT_EQ(reduced_family_test(triangle_threshold(), triangle_dag()).verdict,
            Verdict::Feasible);
  const auto r = reduced_family_test(0.25, triangle_dag());
  ASSERT_EQ(r.verdict, Verdict::CertifiedInfeasible);
  const BlockCovariance cov{BlockPartition::uniform(3, 1), c_matrix(3, 0.25)};
  EXPECT_TRUE(verify_witness(*r.witness, cov, triangle_dag()).valid);
  EXPECT_THROW(reduced_family_test(-0.5, triangle_dag()), std::invalid_argument);
}

TEST(ReducedFamily, MatchesFullCovariance) {
  for (std::size_t d : {2u, 4u}) {
    for (double p : {0.0, 0.1, 0.28, 0.3, 0.7}) {
      EXPECT_EQ(test_compatibility(family_cov(d, p), triangle_dag()).verdict,
                reduced_family_test(p, triangle_dag()).verdict)
          << d << " " << p;
    }
  }
}

TEST(DecompositionCheck, CatchesViolations) {
  const auto cov = family_cov(2, 0.5);
  auto r = test_compatibility(cov, triangle_dag());
  ASSERT_TRUE(r.decomposition);
  auto d = *r.decomposition;
  d.components[0](0, 0) += 1e-3;  // block 0 is not a child of latent 0
  EXPECT_FALSE(check_decomposition(d, cov, triangle_dag()).valid);
  d = *r.decomposition;
  d.remainder(0, 2) = d.remainder(2, 0) = 1e-3;
  EXPECT_FALSE(check_decomposition(d, cov, triangle_dag()).valid);
}

TEST(Verdict, StringRoundTrip) {
  for (auto v : {Verdict::Feasible, Verdict::CertifiedInfeasible, Verdict::Undecided}) {
    EXPECT_EQ(parse_verdict(to_string(v)), v);
  }
  EXPECT_THROW(parse_verdict("maybe"), std::invalid_argument);
  EXPECT_EQ(parse_solver("dykstra"), SolverKind::Dykstra);
}
