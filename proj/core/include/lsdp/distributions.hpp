#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace lsdp {

/// Default refusal threshold for dense pmf tables.
inline constexpr std::size_t kDefaultEntryCap = 10'000'000;

/// Exact joint pmf over a product of finite alphabets. Storage is dense and
/// row-major: the last variable varies fastest.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  /// Validates nonnegativity, normalization (1e-12) and table size.
  DiscreteDistribution(std::vector<std::size_t> alphabet_sizes,
                       std::vector<double> pmf,
                       std::size_t entry_cap = kDefaultEntryCap);

  static DiscreteDistribution uniform(std::vector<std::size_t> alphabet_sizes);
  static DiscreteDistribution point_mass(std::vector<std::size_t> alphabet_sizes,
                                         const std::vector<std::size_t>& outcome);
  /// Product of independent single-variable pmfs.
  static DiscreteDistribution product(
      const std::vector<std::vector<double>>& marginals);

  std::size_t num_variables() const { return alphabets_.size(); }
  const std::vector<std::size_t>& alphabet_sizes() const { return alphabets_; }
  std::size_t alphabet_size(std::size_t m) const { return alphabets_.at(m); }
  std::size_t size() const { return pmf_.size(); }
  const std::vector<double>& pmf() const { return pmf_; }

  double operator[](std::size_t flat) const { return pmf_[flat]; }
  double at(const std::vector<std::size_t>& outcome) const;

  std::size_t flat_index(const std::vector<std::size_t>& outcome) const;
  std::vector<std::size_t> outcome(std::size_t flat) const;

  /// Number of table entries with probability above threshold.
  std::size_t support_size(double threshold = 1e-15) const;

 private:
  std::vector<std::size_t> alphabets_;
  std::vector<std::size_t> strides_;
  std::vector<double> pmf_;
};

/// Conditional table P(out | in), stored as an output_size x input_size
/// column-stochastic matrix.
class LocalChannel {
 public:
  LocalChannel() = default;
  /// Throws std::invalid_argument unless entries are >= 0 and every column
  /// sums to 1 within 1e-12.
  explicit LocalChannel(Eigen::MatrixXd table);

  static LocalChannel identity(std::size_t size);

  std::size_t input_size() const {
    return static_cast<std::size_t>(table_.cols());
  }
  std::size_t output_size() const {
    return static_cast<std::size_t>(table_.rows());
  }
  const Eigen::MatrixXd& table() const { return table_; }
  double operator()(std::size_t out, std::size_t in) const {
    return table_(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  }

  /// Deterministic when every column is a unit vector.
  bool is_deterministic(double tol = 1e-15) const;

  /// Apply `first`, then `second`.
  friend LocalChannel compose(const LocalChannel& first,
                              const LocalChannel& second);

 private:
  Eigen::MatrixXd table_;
};

/// Product-channel pushforward: variable m goes through channels[m].
DiscreteDistribution apply_local_channels(
    const DiscreteDistribution& dist, const std::vector<LocalChannel>& channels);

/// P_p(x'|x) = (1 - p) delta + p / D.
LocalChannel depolarizing_channel(double p, std::size_t alphabet_size);

/// M perfectly correlated uniform D-ary variables, each sent through
/// depolarizing_channel(p, D).
DiscreteDistribution family_pmd(std::size_t num_variables,
                                std::size_t alphabet_size, double p);

/// Perfectly correlated uniform distribution delta_{x1..xM} / D.
DiscreteDistribution perfectly_correlated(std::size_t num_variables,
                                          std::size_t alphabet_size);

/// Marginal over `keep` (0-based, any order, no repeats). The result's
/// variables follow the order given in `keep`.
DiscreteDistribution marginalize(const DiscreteDistribution& dist,
                                 const std::vector<std::size_t>& keep);

/// Exact Gibbs pmf exp(-x^T J x) / Z over x in {-1,+1}^3. Alphabet index 0
/// stands for -1 and index 1 for +1.
DiscreteDistribution ising_distribution(const Eigen::Matrix3d& coupling);

/// Nine standard normals from stream (seed, instance), row-major.
Eigen::Matrix3d random_ising(std::uint64_t seed, std::uint64_t instance = 0);

}  // namespace lsdp
