#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lsdp/causal_graph.hpp"
#include "lsdp/feature_covariance.hpp"
#include "lsdp/linalg.hpp"

namespace lsdp {

struct Tolerances {
  double feasibility = 1e-7;  // relative to max(1, |Cov|_F)
  double psd = 1e-8;          // dual PSD slack, relative to |X|_F
  double gap = 1e-8;          // required tr(X Cov) <= -gap
  std::size_t max_iterations = 50'000;
  std::size_t certificate_every = 25;
};

enum class Verdict { Feasible, CertifiedInfeasible, Undecided };
std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

/// Accelerated: projected gradient with momentum and adaptive restart on the
/// weighted residual. Dykstra: alternating projections between the affine
/// set and the block PSD cone with the Dykstra correction.
enum class SolverKind { Accelerated, Dykstra };
std::string to_string(SolverKind k);
SolverKind parse_solver(const std::string& s);

/// Coordinates of the R_m blocks followed by the C_n blocks, and the weights
/// 1 / (number of blocks covering entry ij) used by the solver.
class StructureLayout {
 public:
  StructureLayout(const BipartiteDag& dag, const BlockPartition& partition);

  std::size_t num_observables() const { return num_r_; }
  std::size_t num_latents() const { return blocks_.size() - num_r_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::size_t>& block(std::size_t b) const { return blocks_.at(b); }
  const std::vector<std::size_t>& r_block(std::size_t m) const { return blocks_.at(m); }
  const std::vector<std::size_t>& c_block(std::size_t n) const {
    return blocks_.at(num_r_ + n);
  }
  /// Entry (i,j) is 1/c_ij where c_ij blocks cover it, and 1 when uncovered.
  const Matrix& weights() const { return weights_; }
  const Matrix& coverage() const { return coverage_; }

 private:
  std::size_t num_r_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<std::size_t>> blocks_;
  Matrix weights_;
  Matrix coverage_;
};

/// Block-diagonal variable Z: one R_m per observable (d_m x d_m) and one C_n
/// per latent, in the coordinates of support_indices(dag, partition, n).
struct StructuredVariable {
  std::vector<Matrix> r;
  std::vector<Matrix> c;
};

StructuredVariable zero_variable(const StructureLayout& layout);

/// Sum of all blocks embedded into the K x K space.
Matrix constraint_map(const StructuredVariable& z, const StructureLayout& layout);
Matrix constraint_map(const StructuredVariable& z, const BipartiteDag& dag,
                      const BlockPartition& partition);

/// Compressions of X onto every block.
StructuredVariable adjoint_map(const Matrix& x, const StructureLayout& layout);
StructuredVariable adjoint_map(const Matrix& x, const BipartiteDag& dag,
                               const BlockPartition& partition);

/// Sum of Frobenius inner products of corresponding blocks.
double inner_product(const StructuredVariable& a, const StructuredVariable& b);

/// Smallest eigenvalue over all blocks.
double min_block_eigenvalue(const StructuredVariable& z);

/// Cov = R + sum_n C_n with every term embedded as a K x K matrix.
struct Decomposition {
  Matrix remainder;
  std::vector<Matrix> components;
};

Decomposition embed(const StructuredVariable& z, const StructureLayout& layout);

struct Witness {
  Matrix x;                   // unit Frobenius norm
  double gap = 0.0;           // tr(X Cov)
  double dual_min_eig = 0.0;  // min eigenvalue over the blocks of A^dagger(X)
};

struct WitnessCheck {
  bool valid = false;
  double gap = 0.0;
  double dual_min_eig = 0.0;
  double norm = 0.0;
};

/// valid iff min eig(A^dagger X) >= -tol.psd * |X|_F and tr(X Cov) <= -tol.gap.
WitnessCheck verify_witness(const Witness& witness, const BlockCovariance& cov,
                            const BipartiteDag& dag, const Tolerances& tol = {});

struct DecompositionCheck {
  bool valid = false;
  double residual = 0.0;       // |R + sum C_n - Cov|_F
  double min_eigenvalue = 0.0; // over R and all C_n
  double support_leak = 0.0;   // largest entry outside the allowed pattern
  std::string failure;
};

/// Checks the decomposition invariants independently of any solver: R is
/// block-diagonal, C_n lives on P^(n), all terms are PSD to -1e-9 * norm and
/// the sum matches Cov to tol.feasibility * max(1, |Cov|_F).
DecompositionCheck check_decomposition(const Decomposition& d,
                                       const BlockCovariance& cov,
                                       const BipartiteDag& dag,
                                       const Tolerances& tol = {});

struct TestReport {
  Verdict verdict = Verdict::Undecided;
  double residual = 0.0;  // |A(Z) - Cov|_F at the final iterate
  std::size_t iterations = 0;
  std::optional<Decomposition> decomposition;
  std::optional<Witness> witness;
  Tolerances tolerances;
  SolverKind solver = SolverKind::Accelerated;
};

/// Semidefinite compatibility test of `cov` against `dag`. Throws
/// std::invalid_argument for an invalid covariance or a partition that does
/// not match the dag; never throws on non-convergence.
TestReport test_compatibility(const BlockCovariance& cov, const BipartiteDag& dag,
                              const Tolerances& tol = {},
                              SolverKind solver = SolverKind::Accelerated);

/// test_compatibility on the M x M matrix C(p) with scalar blocks, where
/// M = dag.num_observables().
TestReport reduced_family_test(double p, const BipartiteDag& dag,
                               const Tolerances& tol = {},
                               SolverKind solver = SolverKind::Accelerated);

}  // namespace lsdp
