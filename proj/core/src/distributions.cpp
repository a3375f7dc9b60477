#include "lsdp/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lsdp/rng.hpp"

namespace lsdp {

namespace {

constexpr double kNormTol = 1e-12;
constexpr std::size_t kCompensatedThreshold = 10'000;

std::size_t checked_product(const std::vector<std::size_t>& sizes,
                            std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t s : sizes) {
    if (s == 0) {
      throw std::invalid_argument("alphabet size must be at least 1");
    }
    if (total > cap / s) {
      throw std::length_error("pmf table exceeds the entry cap of " +
                              std::to_string(cap));
    }
    total *= s;
  }
  return total;
}

// Neumaier summation; plain loop for small inputs.
class Accumulator {
 public:
  explicit Accumulator(bool compensated) : compensated_(compensated) {}
  void add(double v) {
    if (!compensated_) {
      sum_ += v;
      return;
    }
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  bool compensated_;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<std::size_t> alphabet_sizes,
                                           std::vector<double> pmf,
                                           std::size_t entry_cap)
    : alphabets_(std::move(alphabet_sizes)), pmf_(std::move(pmf)) {
  if (alphabets_.empty()) {
    throw std::invalid_argument("DiscreteDistribution: no variables");
  }
  const std::size_t expected = checked_product(alphabets_, entry_cap);
  if (pmf_.size() != expected) {
    throw std::invalid_argument("DiscreteDistribution: pmf has " +
                                std::to_string(pmf_.size()) +
                                " entries, expected " + std::to_string(expected));
  }
  Accumulator total(pmf_.size() > kCompensatedThreshold);
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    const double v = pmf_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("DiscreteDistribution: entry " +
                                  std::to_string(i) +
                                  " is negative or not finite");
    }
    total.add(v);
  }
  if (std::abs(total.value() - 1.0) > kNormTol) {
    throw std::invalid_argument("DiscreteDistribution: entries sum to " +
                                std::to_string(total.value()) + ", not 1");
  }
  strides_.assign(alphabets_.size(), 1);
  for (std::size_t m = alphabets_.size(); m-- > 1;) {
    strides_[m - 1] = strides_[m] * alphabets_[m];
  }
}

DiscreteDistribution DiscreteDistribution::uniform(
    std::vector<std::size_t> alphabet_sizes) {
  const std::size_t n = checked_product(alphabet_sizes, kDefaultEntryCap);
  return DiscreteDistribution(std::move(alphabet_sizes),
                              std::vector<double>(n, 1.0 / double(n)));
}

DiscreteDistribution DiscreteDistribution::point_mass(
    std::vector<std::size_t> alphabet_sizes,
    const std::vector<std::size_t>& outcome) {
  const std::size_t n = checked_product(alphabet_sizes, kDefaultEntryCap);
  std::vector<double> pmf(n, 0.0);
  std::size_t flat = 0;
  if (outcome.size() != alphabet_sizes.size()) {
    throw std::invalid_argument("point_mass: outcome arity mismatch");
  }
  for (std::size_t m = 0; m < outcome.size(); ++m) {
    if (outcome[m] >= alphabet_sizes[m]) {
      throw std::out_of_range("point_mass: outcome out of range");
    }
    flat = flat * alphabet_sizes[m] + outcome[m];
  }
  pmf[flat] = 1.0;
  return DiscreteDistribution(std::move(alphabet_sizes), std::move(pmf));
}

DiscreteDistribution DiscreteDistribution::product(
    const std::vector<std::vector<double>>& marginals) {
  std::vector<std::size_t> sizes;
  for (const auto& m : marginals) sizes.push_back(m.size());
  const std::size_t n = checked_product(sizes, kDefaultEntryCap);
  std::vector<double> pmf(n, 1.0);
  std::size_t stride = n;
  for (std::size_t m = 0; m < marginals.size(); ++m) {
    stride /= sizes[m];
    for (std::size_t i = 0; i < n; ++i) {
      pmf[i] *= marginals[m][(i / stride) % sizes[m]];
    }
  }
  return DiscreteDistribution(std::move(sizes), std::move(pmf));
}

std::size_t DiscreteDistribution::flat_index(
    const std::vector<std::size_t>& outcome) const {
  if (outcome.size() != alphabets_.size()) {
    throw std::invalid_argument("flat_index: outcome arity mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t m = 0; m < outcome.size(); ++m) {
    if (outcome[m] >= alphabets_[m]) {
      throw std::out_of_range("flat_index: outcome out of range");
    }
    flat += outcome[m] * strides_[m];
  }
  return flat;
}

std::vector<std::size_t> DiscreteDistribution::outcome(std::size_t flat) const {
  std::vector<std::size_t> out(alphabets_.size());
  for (std::size_t m = 0; m < alphabets_.size(); ++m) {
    out[m] = (flat / strides_[m]) % alphabets_[m];
  }
  return out;
}

double DiscreteDistribution::at(const std::vector<std::size_t>& outcome) const {
  return pmf_[flat_index(outcome)];
}

std::size_t DiscreteDistribution::support_size(double threshold) const {
  return static_cast<std::size_t>(std::count_if(
      pmf_.begin(), pmf_.end(), [&](double v) { return v > threshold; }));
}

LocalChannel::LocalChannel(Eigen::MatrixXd table) : table_(std::move(table)) {
  if (table_.rows() == 0 || table_.cols() == 0) {
    throw std::invalid_argument("LocalChannel: empty table");
  }
  if (!table_.allFinite() || table_.minCoeff() < 0.0) {
    throw std::invalid_argument("LocalChannel: entries must be finite and >= 0");
  }
  for (Eigen::Index c = 0; c < table_.cols(); ++c) {
    if (std::abs(table_.col(c).sum() - 1.0) > kNormTol) {
      throw std::invalid_argument("LocalChannel: column " + std::to_string(c) +
                                  " does not sum to 1");
    }
  }
}

LocalChannel LocalChannel::identity(std::size_t size) {
  const auto n = static_cast<Eigen::Index>(size);
  return LocalChannel(Eigen::MatrixXd::Identity(n, n));
}

bool LocalChannel::is_deterministic(double tol) const {
  for (Eigen::Index c = 0; c < table_.cols(); ++c) {
    const double top = table_.col(c).maxCoeff();
    if (std::abs(top - 1.0) > tol) return false;
  }
  return true;
}

LocalChannel compose(const LocalChannel& first, const LocalChannel& second) {
  if (second.input_size() != first.output_size()) {
    throw std::invalid_argument("compose: channel sizes do not chain");
  }
  return LocalChannel(second.table_ * first.table_);
}

DiscreteDistribution apply_local_channels(
    const DiscreteDistribution& dist,
    const std::vector<LocalChannel>& channels) {
  const std::size_t nvars = dist.num_variables();
  if (channels.size() != nvars) {
    throw std::invalid_argument("apply_local_channels: expected " +
                                std::to_string(nvars) + " channels, got " +
                                std::to_string(channels.size()));
  }
  std::vector<std::size_t> sizes = dist.alphabet_sizes();
  std::vector<double> cur = dist.pmf();
  for (std::size_t m = 0; m < nvars; ++m) {
    const LocalChannel& ch = channels[m];
    if (ch.input_size() != sizes[m]) {
      throw std::invalid_argument(
          "apply_local_channels: channel " + std::to_string(m) +
          " expects alphabet " + std::to_string(ch.input_size()) +
          " but variable has " + std::to_string(sizes[m]));
    }
    std::size_t outer = 1;
    for (std::size_t k = 0; k < m; ++k) outer *= sizes[k];
    std::size_t inner = 1;
    for (std::size_t k = m + 1; k < nvars; ++k) inner *= sizes[k];
    const std::size_t din = sizes[m];
    const std::size_t dout = ch.output_size();
    std::vector<double> next(outer * dout * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t x = 0; x < din; ++x) {
        const double* src = &cur[(o * din + x) * inner];
        for (std::size_t y = 0; y < dout; ++y) {
          const double w = ch(y, x);
          if (w == 0.0) continue;
          double* dst = &next[(o * dout + y) * inner];
          for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
        }
      }
    }
    sizes[m] = dout;
    cur = std::move(next);
  }
  return DiscreteDistribution(std::move(sizes), std::move(cur));
}

LocalChannel depolarizing_channel(double p, std::size_t alphabet_size) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("depolarizing_channel: p must lie in [0, 1]");
  }
  if (alphabet_size < 2) {
    throw std::invalid_argument("depolarizing_channel: alphabet size must be >= 2");
  }
  const auto n = static_cast<Eigen::Index>(alphabet_size);
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(n, n, p / double(alphabet_size));
  t.diagonal().array() += 1.0 - p;
  return LocalChannel(std::move(t));
}

DiscreteDistribution perfectly_correlated(std::size_t num_variables,
                                          std::size_t alphabet_size) {
  if (num_variables == 0 || alphabet_size == 0) {
    throw std::invalid_argument("perfectly_correlated: empty shape");
  }
  std::vector<std::size_t> sizes(num_variables, alphabet_size);
  const std::size_t n = checked_product(sizes, kDefaultEntryCap);
  std::vector<double> pmf(n, 0.0);
  // flat index of (v, v, ..., v) is v * (1 + D + D^2 + ...)
  std::size_t diag_step = 0;
  for (std::size_t k = 0, s = 1; k < num_variables; ++k, s *= alphabet_size) {
    diag_step += s;
  }
  for (std::size_t v = 0; v < alphabet_size; ++v) {
    pmf[v * diag_step] = 1.0 / double(alphabet_size);
  }
  return DiscreteDistribution(std::move(sizes), std::move(pmf));
}

DiscreteDistribution family_pmd(std::size_t num_variables,
                                std::size_t alphabet_size, double p) {
  if (num_variables == 0) {
    throw std::invalid_argument("family_pmd: need at least one variable");
  }
  if (alphabet_size < 2) {
    throw std::invalid_argument("family_pmd: alphabet size must be >= 2");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("family_pmd: p must lie in [0, 1]");
  }
  // P(x) = (1/D) sum_v prod_m [(1-p) [x_m = v] + p/D]. Only the multiplicity
  // of each value in x matters: values absent from x contribute (p/D)^M.
  const double D = double(alphabet_size);
  const double hit = (1.0 - p) + p / D;
  const double miss = p / D;
  std::vector<double> hit_pow(num_variables + 1), miss_pow(num_variables + 1);
  hit_pow[0] = miss_pow[0] = 1.0;
  for (std::size_t k = 1; k <= num_variables; ++k) {
    hit_pow[k] = hit_pow[k - 1] * hit;
    miss_pow[k] = miss_pow[k - 1] * miss;
  }
  std::vector<std::size_t> sizes(num_variables, alphabet_size);
  const std::size_t n = checked_product(sizes, kDefaultEntryCap);
  std::vector<double> pmf(n);
  std::vector<std::size_t> digits(num_variables, 0);
  std::vector<std::size_t> counts(alphabet_size, 0);
  counts[0] = num_variables;
  for (std::size_t flat = 0; flat < n; ++flat) {
    double s = 0.0;
    std::size_t distinct = 0;
    for (std::size_t v = 0; v < alphabet_size; ++v) {
      if (counts[v] == 0) continue;
      ++distinct;
      s += hit_pow[counts[v]] * miss_pow[num_variables - counts[v]];
    }
    s += double(alphabet_size - distinct) * miss_pow[num_variables];
    pmf[flat] = s / D;
    // odometer increment, last variable fastest
    for (std::size_t m = num_variables; m-- > 0;) {
      --counts[digits[m]];
      if (++digits[m] < alphabet_size) {
        ++counts[digits[m]];
        break;
      }
      digits[m] = 0;
      ++counts[0];
    }
  }
  return DiscreteDistribution(std::move(sizes), std::move(pmf));
}

DiscreteDistribution marginalize(const DiscreteDistribution& dist,
                                 const std::vector<std::size_t>& keep) {
  if (keep.empty()) {
    throw std::invalid_argument("marginalize: subset must be non-empty");
  }
  const std::size_t nvars = dist.num_variables();
  std::vector<bool> seen(nvars, false);
  std::vector<std::size_t> sizes;
  for (std::size_t k : keep) {
    if (k >= nvars) throw std::out_of_range("marginalize: variable out of range");
    if (seen[k]) throw std::invalid_argument("marginalize: repeated variable");
    seen[k] = true;
    sizes.push_back(dist.alphabet_size(k));
  }
  const std::size_t out_n = checked_product(sizes, kDefaultEntryCap);
  const bool compensated = dist.size() > kCompensatedThreshold;
  std::vector<Accumulator> acc(out_n, Accumulator(compensated));

  std::vector<std::size_t> digits(nvars, 0);
  const auto& alph = dist.alphabet_sizes();
  for (std::size_t flat = 0; flat < dist.size(); ++flat) {
    std::size_t out = 0;
    for (std::size_t k : keep) out = out * alph[k] + digits[k];
    acc[out].add(dist[flat]);
    for (std::size_t m = nvars; m-- > 0;) {
      if (++digits[m] < alph[m]) break;
      digits[m] = 0;
    }
  }
  std::vector<double> pmf(out_n);
  for (std::size_t i = 0; i < out_n; ++i) pmf[i] = acc[i].value();
  return DiscreteDistribution(std::move(sizes), std::move(pmf));
}

DiscreteDistribution ising_distribution(const Eigen::Matrix3d& coupling) {
  if (!coupling.allFinite()) {
    throw std::invalid_argument("ising_distribution: coupling must be finite");
  }
  std::array<double, 8> energy{};
  for (int flat = 0; flat < 8; ++flat) {
    const Eigen::Vector3d x((flat & 4) ? 1.0 : -1.0, (flat & 2) ? 1.0 : -1.0,
                            (flat & 1) ? 1.0 : -1.0);
    energy[flat] = -x.dot(coupling * x);
  }
  const double top = *std::max_element(energy.begin(), energy.end());
  std::vector<double> pmf(8);
  double z = 0.0;
  for (int i = 0; i < 8; ++i) {
    pmf[i] = std::exp(energy[i] - top);
    z += pmf[i];
  }
  for (double& v : pmf) v /= z;
  return DiscreteDistribution({2, 2, 2}, std::move(pmf));
}

Eigen::Matrix3d random_ising(std::uint64_t seed, std::uint64_t instance) {
  CounterRng rng(seed, instance);
  Eigen::Matrix3d j;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) j(r, c) = rng.normal();
  }
  return j;
}

}  // namespace lsdp
