#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lsdp {

/// Bipartite latent DAG over M observables. Latent n has children
/// hyperedges()[n]; all indices are 0-based in the C++ API (the JSON format
/// is 1-based).
///
/// Hyperedges are stored sorted and deduplicated internally, but their order
/// (the latent labelling) is preserved. Duplicate hyperedges and parentless
/// observables are legal.
class BipartiteDag {
 public:
  BipartiteDag() = default;

  /// Throws std::invalid_argument if num_observables == 0, a hyperedge is
  /// empty, or a child index is out of range.
  BipartiteDag(std::size_t num_observables,
               std::vector<std::vector<std::size_t>> hyperedges);

  std::size_t num_observables() const { return num_observables_; }
  std::size_t num_latents() const { return hyperedges_.size(); }
  const std::vector<std::vector<std::size_t>>& hyperedges() const {
    return hyperedges_;
  }

  /// ch(L_n).
  const std::vector<std::size_t>& children(std::size_t latent) const;

  /// pa(O_m), ascending.
  std::vector<std::size_t> parents(std::size_t observable) const;

  bool is_parentless(std::size_t observable) const;

  /// Largest number of children of any latent; 0 when there are none.
  std::size_t max_latent_degree() const;

  /// Same graph with hyperedges sorted lexicographically.
  BipartiteDag canonical() const;

  /// Structural equality up to hyperedge order.
  friend bool operator==(const BipartiteDag& a, const BipartiteDag& b);

 private:
  std::size_t num_observables_ = 0;
  std::vector<std::vector<std::size_t>> hyperedges_;
};

/// The triangle scenario: three observables, latent n parents every
/// observable except n.
BipartiteDag triangle_dag();

/// A single latent parenting all M observables.
BipartiteDag global_confounder_dag(std::size_t num_observables);

/// Per-observable block dimensions d_m and the derived offsets into V.
class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<std::size_t> dims);

  static BlockPartition uniform(std::size_t num_blocks, std::size_t dim);

  std::size_t num_blocks() const { return dims_.size(); }
  std::size_t dim(std::size_t m) const { return dims_.at(m); }
  std::size_t offset(std::size_t m) const { return offsets_.at(m); }
  std::size_t total() const { return total_; }
  const std::vector<std::size_t>& dims() const { return dims_; }

  /// Row indices of block m, i.e. the coordinates selected by P_m.
  std::vector<std::size_t> block_indices(std::size_t m) const;

  friend bool operator==(const BlockPartition& a, const BlockPartition& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

/// Coordinates of the projector P^(n) = sum over children of P_m, ascending.
std::vector<std::size_t> support_indices(const BipartiteDag& dag,
                                         const BlockPartition& partition,
                                         std::size_t latent);

}  // namespace lsdp
