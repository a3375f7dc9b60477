#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lsdp/causal_graph.hpp"
#include "lsdp/distributions.hpp"
#include "lsdp/feature_covariance.hpp"
#include "lsdp/linalg.hpp"
#include "lsdp/sdp.hpp"

namespace lsdp {

/// Random vector over a finite alphabet: outcome j is vectors.col(j) with
/// probability probabilities[j].
struct FiniteRealization {
  Matrix vectors;
  std::vector<double> probabilities;

  Vector mean() const;
  Matrix second_moment() const;  // sum_j p_j y_j y_j^T
  Matrix covariance() const;
};

/// Uniform random vector on D outcomes with zero mean and second moment C.
/// The vectors are sqrt(D) sqrt(C) v_j with v_j = sum_k U_jk z_k, where z_k
/// span range(C) and U is orthogonal with column rank(C) equal to the
/// normalized all-ones vector. The rest of U comes from Gram-Schmidt on
/// vectors drawn from CounterRng(seed). Throws std::domain_error when
/// D <= rank(C) (rank at 1e-10 * lambda_max).
FiniteRealization finite_alphabet_realization(const Matrix& c,
                                              std::size_t alphabet_size,
                                              std::uint64_t seed = 0);

struct RankBound {
  bool holds = false;
  std::size_t rank = 0;
  std::size_t support = 0;  // outcomes with probability > 1e-15
};

/// rank(Cov(Y)) <= (supported alphabet size of Y) - 1 for the joint Y.
RankBound rank_bound_check(const DiscreteDistribution& dist,
                           const FeatureMap& features);

/// Sum of the remaining R_m plus all C_n regrouped as one PSD term per
/// latent: each parented R_m is split equally over its parents. Terms are
/// K x K; the parentless R_m are returned separately.
struct DistributedRemainder {
  std::vector<Matrix> components;  // C~_n
  std::vector<std::optional<Matrix>> parentless;  // R_m on V_m, by observable
};

DistributedRemainder distribute_remainder(const Decomposition& d,
                                          const BipartiteDag& dag,
                                          const BlockPartition& partition);

/// Causal model from a decomposition: latent n is a random vector on the
/// coordinates of P^(n) (finite alphabet, covariance C~_n) and each
/// parentless observable carries its own independent noise vector on V_m.
/// Y_m is the sum of the V_m parts of its parents' latents plus its noise.
struct VectorLatentModel {
  BipartiteDag dag;
  BlockPartition partition;
  std::vector<FiniteRealization> latents;  // rows = |support_indices(n)|
  std::vector<std::optional<FiniteRealization>> noise;  // rows = d_m

  /// Exact Cov(Y) by enumeration of each independent variable's outcomes.
  Matrix covariance() const;
};

/// Throws std::invalid_argument if d fails check_decomposition's support or
/// PSD invariants for dag (the sum is not checked against any covariance).
VectorLatentModel realize(const Decomposition& d, const BipartiteDag& dag,
                          const BlockPartition& partition, std::uint64_t seed = 0);

}  // namespace lsdp
