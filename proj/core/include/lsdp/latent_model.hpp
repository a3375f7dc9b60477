#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lsdp/causal_graph.hpp"
#include "lsdp/distributions.hpp"
#include "lsdp/feature_covariance.hpp"
#include "lsdp/linalg.hpp"
#include "lsdp/rng.hpp"

namespace lsdp {

/// Causal model on a bipartite DAG with finite, mutually independent latents.
///
/// responses[m] is the D_m x (prod of parent alphabets) column-stochastic
/// table P(O_m | pa(O_m)). Parent configurations are indexed row-major over
/// dag.parents(m) in ascending order, last parent fastest. A parentless
/// observable has a single column.
struct LatentModel {
  BipartiteDag dag;
  std::vector<std::vector<double>> latent_pmfs;
  std::vector<Matrix> responses;
  FeatureMap features;

  std::size_t alphabet_size(std::size_t m) const {
    return static_cast<std::size_t>(responses.at(m).rows());
  }
  std::vector<std::size_t> alphabet_sizes() const;

  /// Throws std::invalid_argument on any shape or stochasticity violation.
  void validate() const;
};

/// Default cap on the number of joint latent configurations enumerated.
inline constexpr std::size_t kLatentEnumerationCap = 1'000'000;

/// Exact observable pmf: sum over latent configurations of
/// prod_n P(l_n) prod_m P(o_m | pa). Throws std::length_error past the cap.
DiscreteDistribution observable_distribution(
    const LatentModel& model, std::size_t cap = kLatentEnumerationCap);

BlockCovariance model_covariance(const LatentModel& model);

/// Components of the chain decomposition Cov = R + sum_n C_n obtained by
/// conditioning on the latents one at a time in `ordering`.
struct ChainDecomposition {
  Matrix covariance;       // Cov(Y) by direct moment summation
  Matrix remainder;        // R = E Cov(Y | all latents)
  std::vector<Matrix> components;  // C_n, indexed by latent (not position)
  double sum_error = 0.0;          // max |Cov - R - sum C_n|
  double min_eigenvalue = 0.0;     // over R and all C_n
  double support_leak = 0.0;       // max |entry| of C_n outside P^(n)
};

/// Every term is an exact conditional expectation over the enumerated latent
/// configurations. `ordering` is a permutation of the latent indices; an
/// empty ordering means 0, 1, ..., N-1. Throws std::logic_error if the sum,
/// PSD or support checks fail at 1e-9 relative tolerance.
ChainDecomposition chain_decomposition_oracle(
    const LatentModel& model, std::vector<std::size_t> ordering = {},
    std::size_t cap = kLatentEnumerationCap);

struct RandomModelOptions {
  std::size_t max_latent_alphabet = 3;
  std::size_t max_observable_alphabet = 3;
  std::size_t min_observable_alphabet = 2;
  bool random_features = false;  // orthonormal features otherwise
};

/// Random model on `dag`; deterministic given the generator state.
LatentModel random_latent_model(const BipartiteDag& dag, CounterRng& rng,
                                const RandomModelOptions& options = {});

/// Random bipartite DAG with 1..max_observables observables and
/// 0..max_latents latents; each hyperedge is a random non-empty subset.
BipartiteDag random_bipartite_dag(CounterRng& rng, std::size_t max_observables,
                                  std::size_t max_latents);

}  // namespace lsdp
