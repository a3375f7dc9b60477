#pragma once

#include <cstddef>
#include <vector>

#include "lsdp/causal_graph.hpp"
#include "lsdp/distributions.hpp"
#include "lsdp/linalg.hpp"

namespace lsdp {

/// Feature vectors for each observable. vectors(m) is k_m x D_m; column j is
/// the vector assigned to outcome j of observable m.
class FeatureMap {
 public:
  FeatureMap() = default;
  explicit FeatureMap(std::vector<Matrix> per_observable);

  std::size_t num_observables() const { return maps_.size(); }
  const Matrix& vectors(std::size_t m) const { return maps_.at(m); }
  std::size_t alphabet_size(std::size_t m) const {
    return static_cast<std::size_t>(maps_.at(m).cols());
  }
  std::size_t feature_dim(std::size_t m) const {
    return static_cast<std::size_t>(maps_.at(m).rows());
  }

  BlockPartition partition() const;

  /// Linearly independent vectors with k_m == D_m for observable m, judged
  /// by the Gram matrix's eigenvalue floor 1e-10 * lambda_max.
  bool is_universal(std::size_t m) const;
  bool is_universal() const;

 private:
  std::vector<Matrix> maps_;
};

/// Standard basis vectors e_1..e_D for every observable.
FeatureMap orthonormal_feature_map(const std::vector<std::size_t>& alphabet_sizes);

/// Symmetric K x K matrix with one block per observable.
struct BlockCovariance {
  BlockPartition partition;
  Matrix matrix;

  /// Block (m, m'), i.e. P_m Cov P_m' restricted to the two subspaces.
  Matrix block(std::size_t m, std::size_t mp) const;
};

/// Throws std::invalid_argument unless the matrix is square, finite, matches
/// the partition, is symmetric to 1e-12 relative and PSD to
/// -1e-9 * spectral norm.
void validate_covariance(const BlockCovariance& cov);

/// Exact Cov(Y) for Y = sum_m Y_m. Each block is assembled from the
/// single/pairwise marginals, so only mono- and bipartite margins matter.
BlockCovariance covariance_from_distribution(const DiscreteDistribution& dist,
                                             const FeatureMap& features);

/// Linear maps phi_m taking source feature vectors to target ones:
/// phi_m = Ytarget G^{-1} Ysource^T. Requires a universal source; throws
/// std::domain_error otherwise.
std::vector<Matrix> transport_map(const FeatureMap& from, const FeatureMap& to);

/// phi Cov phi^T for block-diagonal phi. `target` gives the output partition.
BlockCovariance transport_covariance(const BlockCovariance& cov,
                                     const std::vector<Matrix>& maps);

struct PushforwardCovariance {
  std::vector<Matrix> psi;          // psi_m : V_m -> target space of m
  std::vector<Matrix> corrections;  // W_m, PSD, on the target space of m
  BlockCovariance composed;         // psi Cov psi^T + sum W_m
  BlockCovariance direct;           // computed from the pushed-forward pmf
  double discrepancy = 0.0;         // max |composed - direct|
};

/// Covariance after local channels, by both routes. Throws std::domain_error
/// for a non-universal source and std::logic_error if the routes disagree
/// beyond 1e-9 * max(1, |direct|) or some W_m fails PSD.
PushforwardCovariance pushforward_covariance(
    const DiscreteDistribution& dist, const FeatureMap& from,
    const std::vector<LocalChannel>& channels, const FeatureMap& to);

}  // namespace lsdp
