#include "lsdp/causal_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace lsdp {

BipartiteDag::BipartiteDag(std::size_t num_observables,
                           std::vector<std::vector<std::size_t>> hyperedges)
    : num_observables_(num_observables), hyperedges_(std::move(hyperedges)) {
  if (num_observables_ == 0) {
    throw std::invalid_argument("BipartiteDag: need at least one observable");
  }
  for (std::size_t n = 0; n < hyperedges_.size(); ++n) {
    auto& edge = hyperedges_[n];
    if (edge.empty()) {
      throw std::invalid_argument("BipartiteDag: hyperedge " +
                                  std::to_string(n) + " is empty");
    }
    std::sort(edge.begin(), edge.end());
    edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
    if (edge.back() >= num_observables_) {
      throw std::invalid_argument(
          "BipartiteDag: hyperedge " + std::to_string(n) +
          " references observable " + std::to_string(edge.back()) +
          " but only " + std::to_string(num_observables_) + " exist");
    }
  }
}

const std::vector<std::size_t>& BipartiteDag::children(
    std::size_t latent) const {
  if (latent >= hyperedges_.size()) {
    throw std::out_of_range("BipartiteDag::children: latent index " +
                            std::to_string(latent) + " out of range");
  }
  return hyperedges_[latent];
}

std::vector<std::size_t> BipartiteDag::parents(std::size_t observable) const {
  if (observable >= num_observables_) {
    throw std::out_of_range("BipartiteDag::parents: observable index " +
                            std::to_string(observable) + " out of range");
  }
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < hyperedges_.size(); ++n) {
    if (std::binary_search(hyperedges_[n].begin(), hyperedges_[n].end(),
                           observable)) {
      out.push_back(n);
    }
  }
  return out;
}

bool BipartiteDag::is_parentless(std::size_t observable) const {
  return parents(observable).empty();
}

std::size_t BipartiteDag::max_latent_degree() const {
  std::size_t d = 0;
  for (const auto& e : hyperedges_) d = std::max(d, e.size());
  return d;
}

BipartiteDag BipartiteDag::canonical() const {
  auto edges = hyperedges_;
  std::sort(edges.begin(), edges.end());
  return BipartiteDag(num_observables_, std::move(edges));
}

bool operator==(const BipartiteDag& a, const BipartiteDag& b) {
  if (a.num_observables_ != b.num_observables_) return false;
  auto ea = a.hyperedges_;
  auto eb = b.hyperedges_;
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  return ea == eb;
}

BipartiteDag triangle_dag() { return BipartiteDag(3, {{1, 2}, {0, 2}, {0, 1}}); }

BipartiteDag global_confounder_dag(std::size_t num_observables) {
  std::vector<std::size_t> all(num_observables);
  for (std::size_t m = 0; m < num_observables; ++m) all[m] = m;
  return BipartiteDag(num_observables, {all});
}

BlockPartition::BlockPartition(std::vector<std::size_t> dims)
    : dims_(std::move(dims)) {
  offsets_.reserve(dims_.size());
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (dims_[m] == 0) {
      throw std::invalid_argument("BlockPartition: block " +
                                  std::to_string(m) + " has dimension 0");
    }
    offsets_.push_back(total_);
    total_ += dims_[m];
  }
}

BlockPartition BlockPartition::uniform(std::size_t num_blocks,
                                       std::size_t dim) {
  return BlockPartition(std::vector<std::size_t>(num_blocks, dim));
}

std::vector<std::size_t> BlockPartition::block_indices(std::size_t m) const {
  std::vector<std::size_t> out(dim(m));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = offsets_[m] + i;
  return out;
}

std::vector<std::size_t> support_indices(const BipartiteDag& dag,
                                         const BlockPartition& partition,
                                         std::size_t latent) {
  if (partition.num_blocks() != dag.num_observables()) {
    throw std::invalid_argument(
        "support_indices: partition has " +
        std::to_string(partition.num_blocks()) + " blocks but dag has " +
        std::to_string(dag.num_observables()) + " observables");
  }
  std::vector<std::size_t> out;
  for (std::size_t m : dag.children(latent)) {
    auto idx = partition.block_indices(m);
    out.insert(out.end(), idx.begin(), idx.end());
  }
  return out;
}

}  // namespace lsdp
