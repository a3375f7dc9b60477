#include "lsdp/realization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lsdp/rng.hpp"

namespace lsdp {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kInputPsdTol = 1e-9;

// Orthogonal D x D matrix whose column `ones_col` is (1,...,1)/sqrt(D).
Matrix orthogonal_with_ones(std::size_t dim, std::size_t ones_col,
                            std::uint64_t seed) {
  const auto d = static_cast<Index>(dim);
  CounterRng rng(seed, 0x5f3759df);
  std::vector<Vector> basis;
  basis.push_back(Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(dim))));
  while (basis.size() < dim) {
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = rng.normal();
    // Two passes of classical Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    const double n = v.norm();
    if (n < 1e-8) continue;
    basis.push_back(v / n);
  }
  Matrix u(d, d);
  std::size_t next = 1;
  for (std::size_t col = 0; col < dim; ++col) {
    u.col(static_cast<Index>(col)) = col == ones_col ? basis[0] : basis[next++];
  }
  return u;
}

void embed_into(Matrix& target, const std::vector<std::size_t>& idx,
                const Matrix& block) {
  add_submatrix(target, idx, block);
}

}  // namespace

Vector FiniteRealization::mean() const {
  Vector mu = Vector::Zero(vectors.rows());
  for (Index j = 0; j < vectors.cols(); ++j) {
    mu += probabilities[static_cast<std::size_t>(j)] * vectors.col(j);
  }
  return mu;
}

Matrix FiniteRealization::second_moment() const {
  Matrix s = Matrix::Zero(vectors.rows(), vectors.rows());
  for (Index j = 0; j < vectors.cols(); ++j) {
    s.noalias() += probabilities[static_cast<std::size_t>(j)] * vectors.col(j) *
                   vectors.col(j).transpose();
  }
  return s;
}

Matrix FiniteRealization::covariance() const {
  const Vector mu = mean();
  return symmetrize(second_moment() - mu * mu.transpose());
}

FiniteRealization finite_alphabet_realization(const Matrix& c,
                                              std::size_t alphabet_size,
                                              std::uint64_t seed) {
  if (c.rows() != c.cols()) {
    throw std::invalid_argument("finite_alphabet_realization: matrix not square");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(c));
  const Vector& lambda = eig.eigenvalues();
  const double top = lambda.size() > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Index> range;
  for (Index i = lambda.size(); i-- > 0;) {
    if (top > 0.0 && lambda(i) > kRankTol * top) range.push_back(i);
  }
  const std::size_t rank = range.size();
  if (alphabet_size <= rank) {
    throw std::domain_error("finite_alphabet_realization: alphabet size " +
                            std::to_string(alphabet_size) +
                            " cannot carry a covariance of rank " +
                            std::to_string(rank) + " (need at least rank + 1)");
  }
  const Matrix u = orthogonal_with_ones(alphabet_size, rank, seed);
  const double sd = std::sqrt(static_cast<double>(alphabet_size));
  FiniteRealization out;
  out.vectors = Matrix::Zero(c.rows(), static_cast<Index>(alphabet_size));
  out.probabilities.assign(alphabet_size, 1.0 / static_cast<double>(alphabet_size));
  for (std::size_t k = 0; k < rank; ++k) {
    // sqrt(C) z_k = sqrt(lambda_k) z_k for an eigenvector z_k.
    const Vector root_z = std::sqrt(lambda(range[k])) * eig.eigenvectors().col(range[k]);
    for (Index j = 0; j < out.vectors.cols(); ++j) {
      out.vectors.col(j) += sd * u(j, static_cast<Index>(k)) * root_z;
    }
  }
  return out;
}

RankBound rank_bound_check(const DiscreteDistribution& dist,
                           const FeatureMap& features) {
  RankBound out;
  out.support = dist.support_size(1e-15);
  out.rank = numerical_rank(covariance_from_distribution(dist, features).matrix,
                            kRankTol);
  out.holds = out.support >= 1 && out.rank <= out.support - 1;
  return out;
}

DistributedRemainder distribute_remainder(const Decomposition& d,
                                          const BipartiteDag& dag,
                                          const BlockPartition& partition) {
  if (d.components.size() != dag.num_latents() ||
      partition.num_blocks() != dag.num_observables()) {
    throw std::invalid_argument("distribute_remainder: size mismatch");
  }
  DistributedRemainder out;
  out.components = d.components;
  out.parentless.resize(dag.num_observables());
  for (std::size_t m = 0; m < dag.num_observables(); ++m) {
    const auto idx = partition.block_indices(m);
    const Matrix rm = submatrix(d.remainder, idx);
    const auto parents = dag.parents(m);
    if (parents.empty()) {
      out.parentless[m] = rm;
      continue;
    }
    const Matrix share = rm / static_cast<double>(parents.size());
    for (std::size_t n : parents) embed_into(out.components[n], idx, share);
  }
  return out;
}

Matrix VectorLatentModel::covariance() const {
  const auto k = static_cast<Index>(partition.total());
  Matrix cov = Matrix::Zero(k, k);
  for (std::size_t n = 0; n < latents.size(); ++n) {
    embed_into(cov, support_indices(dag, partition, n), latents[n].covariance());
  }
  for (std::size_t m = 0; m < noise.size(); ++m) {
    if (noise[m]) embed_into(cov, partition.block_indices(m), noise[m]->covariance());
  }
  return cov;
}

VectorLatentModel realize(const Decomposition& d, const BipartiteDag& dag,
                          const BlockPartition& partition, std::uint64_t seed) {
  if (partition.num_blocks() != dag.num_observables()) {
    throw std::invalid_argument("realize: partition does not match the dag");
  }
  // Validate against the decomposition's own sum so only the structural
  // invariants are tested here.
  Matrix total = d.remainder;
  for (const auto& c : d.components) {
    if (c.rows() != d.remainder.rows() || c.cols() != d.remainder.cols()) {
      throw std::invalid_argument("realize: component shape mismatch");
    }
    total += c;
  }
  const BlockCovariance self{partition, symmetrize(total)};
  const auto check = check_decomposition(d, self, dag);
  if (!check.valid) {
    throw std::invalid_argument("realize: invalid decomposition: " + check.failure);
  }

  const DistributedRemainder parts = distribute_remainder(d, dag, partition);
  VectorLatentModel model;
  model.dag = dag;
  model.partition = partition;
  const double scale = std::max(1.0, spectral_norm_sym(self.matrix));
  for (std::size_t n = 0; n < dag.num_latents(); ++n) {
    const Matrix cn = submatrix(parts.components[n],
                                support_indices(dag, partition, n));
    if (min_eigenvalue(cn) < -kInputPsdTol * scale) {
      throw std::logic_error("realize: regrouped component is not PSD");
    }
    const std::size_t rank = numerical_rank(cn, kRankTol);
    model.latents.push_back(finite_alphabet_realization(cn, rank + 1, seed + n));
  }
  model.noise.resize(dag.num_observables());
  for (std::size_t m = 0; m < dag.num_observables(); ++m) {
    if (!parts.parentless[m]) continue;
    const Matrix& rm = *parts.parentless[m];
    const std::size_t rank = numerical_rank(rm, kRankTol);
    model.noise[m] = finite_alphabet_realization(
        rm, rank + 1, seed + dag.num_latents() + m);
  }
  return model;
}

}  // namespace lsdp
