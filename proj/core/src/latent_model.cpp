#include "lsdp/latent_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lsdp {

namespace {

constexpr double kOracleTol = 1e-9;

std::size_t checked_configurations(const std::vector<std::size_t>& sizes,
                                   std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t s : sizes) {
    if (s == 0 || total > cap / s) {
      throw std::length_error("latent enumeration exceeds the cap of " +
                              std::to_string(cap) + " configurations");
    }
    total *= s;
  }
  return total;
}

// Column of responses[m] selected by the full latent configuration `config`
// (indexed by latent).
Index parent_column(const BipartiteDag& dag,
                    const std::vector<std::size_t>& parents,
                    const std::vector<std::vector<double>>& latent_pmfs,
                    const std::vector<std::size_t>& config) {
  (void)dag;
  std::size_t col = 0;
  for (std::size_t n : parents) col = col * latent_pmfs[n].size() + config[n];
  return static_cast<Index>(col);
}

Vector random_simplex(CounterRng& rng, std::size_t n) {
  Vector v(static_cast<Index>(n));
  // Exponential spacings give a uniform point on the simplex; cubing
  // sharpens some draws toward near-deterministic responses.
  const bool sharpen = rng.uniform() < 0.3;
  for (Index i = 0; i < v.size(); ++i) {
    double e = -std::log1p(-rng.uniform());
    if (sharpen) e = e * e * e;
    v(i) = e + 1e-3;
  }
  return v / v.sum();
}

}  // namespace

std::vector<std::size_t> LatentModel::alphabet_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& r : responses) out.push_back(static_cast<std::size_t>(r.rows()));
  return out;
}

void LatentModel::validate() const {
  const std::size_t M = dag.num_observables();
  const std::size_t N = dag.num_latents();
  if (latent_pmfs.size() != N) {
    throw std::invalid_argument("LatentModel: need one pmf per latent");
  }
  for (std::size_t n = 0; n < N; ++n) {
    const auto& p = latent_pmfs[n];
    if (p.empty()) {
      throw std::invalid_argument("LatentModel: latent " + std::to_string(n) +
                                  " has an empty alphabet");
    }
    double s = 0.0;
    for (double v : p) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument("LatentModel: negative latent probability");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      throw std::invalid_argument("LatentModel: latent " + std::to_string(n) +
                                  " pmf does not sum to 1");
    }
  }
  if (responses.size() != M) {
    throw std::invalid_argument("LatentModel: need one response per observable");
  }
  if (features.num_observables() != M) {
    throw std::invalid_argument("LatentModel: feature map size mismatch");
  }
  for (std::size_t m = 0; m < M; ++m) {
    std::size_t cols = 1;
    for (std::size_t n : dag.parents(m)) cols *= latent_pmfs[n].size();
    const Matrix& r = responses[m];
    if (static_cast<std::size_t>(r.cols()) != cols) {
      throw std::invalid_argument("LatentModel: response " + std::to_string(m) +
                                  " has " + std::to_string(r.cols()) +
                                  " columns, expected " + std::to_string(cols));
    }
    if (r.rows() == 0 || r.minCoeff() < 0.0) {
      throw std::invalid_argument("LatentModel: response " + std::to_string(m) +
                                  " is not a conditional table");
    }
    for (Index c = 0; c < r.cols(); ++c) {
      if (std::abs(r.col(c).sum() - 1.0) > 1e-12) {
        throw std::invalid_argument("LatentModel: response " +
                                    std::to_string(m) + " column " +
                                    std::to_string(c) + " does not sum to 1");
      }
    }
    if (features.alphabet_size(m) != static_cast<std::size_t>(r.rows())) {
      throw std::invalid_argument("LatentModel: feature map for observable " +
                                  std::to_string(m) + " has wrong alphabet");
    }
  }
}

DiscreteDistribution observable_distribution(const LatentModel& model,
                                             std::size_t cap) {
  model.validate();
  const std::size_t M = model.dag.num_observables();
  const std::size_t N = model.dag.num_latents();
  std::vector<std::size_t> latent_sizes;
  for (const auto& p : model.latent_pmfs) latent_sizes.push_back(p.size());
  const std::size_t nconf = checked_configurations(latent_sizes, cap);

  const auto sizes = model.alphabet_sizes();
  std::size_t nout = 1;
  for (std::size_t s : sizes) nout *= s;
  if (nout > kDefaultEntryCap || nconf > cap / std::max<std::size_t>(nout, 1)) {
    throw std::length_error("observable_distribution: enumeration too large");
  }

  std::vector<std::vector<std::size_t>> parents(M);
  for (std::size_t m = 0; m < M; ++m) parents[m] = model.dag.parents(m);

  std::vector<double> pmf(nout, 0.0);
  std::vector<double> term(nout);
  std::vector<std::size_t> config(N, 0);
  for (std::size_t c = 0; c < nconf; ++c) {
    double weight = 1.0;
    for (std::size_t n = 0; n < N; ++n) weight *= model.latent_pmfs[n][config[n]];
    if (weight > 0.0) {
      // Outer product of the conditional pmfs, built variable by variable.
      std::size_t len = 1;
      term[0] = weight;
      for (std::size_t m = 0; m < M; ++m) {
        const Index col =
            parent_column(model.dag, parents[m], model.latent_pmfs, config);
        const auto d = sizes[m];
        for (std::size_t i = len; i-- > 0;) {
          const double base = term[i];
          for (std::size_t x = 0; x < d; ++x) {
            term[i * d + x] = base * model.responses[m](static_cast<Index>(x), col);
          }
        }
        len *= d;
      }
      for (std::size_t i = 0; i < nout; ++i) pmf[i] += term[i];
    }
    for (std::size_t n = N; n-- > 0;) {
      if (++config[n] < latent_sizes[n]) break;
      config[n] = 0;
    }
  }
  return DiscreteDistribution(sizes, std::move(pmf));
}

BlockCovariance model_covariance(const LatentModel& model) {
  return covariance_from_distribution(observable_distribution(model),
                                      model.features);
}

ChainDecomposition chain_decomposition_oracle(const LatentModel& model,
                                              std::vector<std::size_t> ordering,
                                              std::size_t cap) {
  model.validate();
  const BipartiteDag& dag = model.dag;
  const std::size_t M = dag.num_observables();
  const std::size_t N = dag.num_latents();
  if (ordering.empty()) {
    ordering.resize(N);
    std::iota(ordering.begin(), ordering.end(), 0);
  }
  {
    auto sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted.size() != N || sorted[i] != i) {
        throw std::invalid_argument(
            "chain_decomposition_oracle: ordering is not a permutation of the "
            "latents");
      }
    }
  }
  // Enumerate configurations in ordering order: position 0 slowest.
  std::vector<std::size_t> sizes_in_order(N);
  for (std::size_t j = 0; j < N; ++j) {
    sizes_in_order[j] = model.latent_pmfs[ordering[j]].size();
  }
  const std::size_t nconf = checked_configurations(sizes_in_order, cap);

  const BlockPartition part = model.features.partition();
  const auto K = static_cast<Index>(part.total());
  std::vector<std::vector<std::size_t>> parents(M);
  for (std::size_t m = 0; m < M; ++m) parents[m] = dag.parents(m);

  ChainDecomposition out;
  out.remainder = Matrix::Zero(K, K);
  out.components.assign(N, Matrix::Zero(K, K));

  // g[level][prefix] = E(Y | first `level` latents in ordering = prefix).
  std::vector<std::vector<Vector>> g(N + 1);
  g[N].assign(nconf, Vector::Zero(K));
  std::vector<std::size_t> config(N, 0);  // indexed by latent
  std::vector<std::size_t> digits(N, 0);  // indexed by position
  for (std::size_t c = 0; c < nconf; ++c) {
    for (std::size_t j = 0; j < N; ++j) config[ordering[j]] = digits[j];
    double weight = 1.0;
    for (std::size_t n = 0; n < N; ++n) weight *= model.latent_pmfs[n][config[n]];
    Vector& mean = g[N][c];
    for (std::size_t m = 0; m < M; ++m) {
      const Index col = parent_column(dag, parents[m], model.latent_pmfs, config);
      const Vector q = model.responses[m].col(col);
      const Matrix& y = model.features.vectors(m);
      const auto o = static_cast<Index>(part.offset(m));
      mean.segment(o, y.rows()) = y * q;
      const Matrix spread = Matrix(q.asDiagonal()) - q * q.transpose();
      out.remainder.block(o, o, y.rows(), y.rows()) +=
          weight * (y * spread * y.transpose());
    }
    for (std::size_t j = N; j-- > 0;) {
      if (++digits[j] < sizes_in_order[j]) break;
      digits[j] = 0;
    }
  }

  // Peel latents from the last position to the first.
  std::size_t level_size = nconf;
  for (std::size_t j = N; j-- > 0;) {
    const std::size_t latent = ordering[j];
    const auto& pj = model.latent_pmfs[latent];
    const std::size_t a = pj.size();
    const std::size_t prefixes = level_size / a;
    g[j].assign(prefixes, Vector::Zero(K));
    for (std::size_t pre = 0; pre < prefixes; ++pre) {
      for (std::size_t l = 0; l < a; ++l) g[j][pre] += pj[l] * g[j + 1][pre * a + l];
    }
    // Weight of each prefix: product of the pmfs of positions 0..j-1.
    Matrix& cn = out.components[latent];
    std::vector<std::size_t> pd(j, 0);
    for (std::size_t pre = 0; pre < prefixes; ++pre) {
      double w = 1.0;
      for (std::size_t i = 0; i < j; ++i) w *= model.latent_pmfs[ordering[i]][pd[i]];
      if (w > 0.0) {
        for (std::size_t l = 0; l < a; ++l) {
          const Vector diff = g[j + 1][pre * a + l] - g[j][pre];
          cn.noalias() += (w * pj[l]) * diff * diff.transpose();
        }
      }
      for (std::size_t i = j; i-- > 0;) {
        if (++pd[i] < sizes_in_order[i]) break;
        pd[i] = 0;
      }
    }
    level_size = prefixes;
  }

  out.covariance = model_covariance(model).matrix;
  Matrix total = out.remainder;
  for (const auto& c : out.components) total += c;
  out.sum_error = (total - out.covariance).cwiseAbs().maxCoeff();

  const double scale = std::max(1.0, spectral_norm_sym(out.covariance));
  out.min_eigenvalue = min_eigenvalue(out.remainder);
  for (std::size_t n = 0; n < N; ++n) {
    out.min_eigenvalue =
        std::min(out.min_eigenvalue, min_eigenvalue(out.components[n]));
    const auto supp = support_indices(dag, part, n);
    std::vector<bool> inside(static_cast<std::size_t>(K), false);
    for (std::size_t i : supp) inside[i] = true;
    for (Index r = 0; r < K; ++r) {
      for (Index c = 0; c < K; ++c) {
        if (inside[static_cast<std::size_t>(r)] &&
            inside[static_cast<std::size_t>(c)]) {
          continue;
        }
        out.support_leak =
            std::max(out.support_leak, std::abs(out.components[n](r, c)));
      }
    }
  }
  if (out.sum_error > kOracleTol * scale) {
    throw std::logic_error("chain_decomposition_oracle: components miss Cov by " +
                           std::to_string(out.sum_error));
  }
  if (out.min_eigenvalue < -kOracleTol * scale) {
    throw std::logic_error("chain_decomposition_oracle: component not PSD");
  }
  if (out.support_leak > kOracleTol * scale) {
    throw std::logic_error(
        "chain_decomposition_oracle: component leaks outside its support");
  }
  return out;
}

LatentModel random_latent_model(const BipartiteDag& dag, CounterRng& rng,
                                const RandomModelOptions& options) {
  const auto pick = [&rng](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform() * double(hi - lo + 1));
  };
  LatentModel model;
  model.dag = dag;
  for (std::size_t n = 0; n < dag.num_latents(); ++n) {
    const Vector p = random_simplex(rng, pick(1, options.max_latent_alphabet));
    model.latent_pmfs.emplace_back(p.data(), p.data() + p.size());
    // Re-normalize exactly in double so validation at 1e-12 passes.
    double s = 0.0;
    for (double v : model.latent_pmfs.back()) s += v;
    for (double& v : model.latent_pmfs.back()) v /= s;
  }
  std::vector<Matrix> features;
  for (std::size_t m = 0; m < dag.num_observables(); ++m) {
    const std::size_t d =
        pick(options.min_observable_alphabet, options.max_observable_alphabet);
    std::size_t cols = 1;
    for (std::size_t n : dag.parents(m)) cols *= model.latent_pmfs[n].size();
    Matrix r(static_cast<Index>(d), static_cast<Index>(cols));
    for (Index c = 0; c < r.cols(); ++c) r.col(c) = random_simplex(rng, d);
    model.responses.push_back(std::move(r));
    const auto dd = static_cast<Index>(d);
    if (options.random_features) {
      Matrix y(dd, dd);
      for (Index i = 0; i < y.size(); ++i) y.data()[i] = rng.normal();
      features.push_back(std::move(y));
    } else {
      features.push_back(Matrix::Identity(dd, dd));
    }
  }
  model.features = FeatureMap(std::move(features));
  model.validate();
  return model;
}

BipartiteDag random_bipartite_dag(CounterRng& rng, std::size_t max_observables,
                                  std::size_t max_latents) {
  const auto pick = [&rng](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform() * double(hi - lo + 1));
  };
  const std::size_t M = pick(1, max_observables);
  const std::size_t N = pick(0, max_latents);
  std::vector<std::vector<std::size_t>> edges;
  for (std::size_t n = 0; n < N; ++n) {
    std::vector<std::size_t> edge;
    while (edge.empty()) {
      for (std::size_t m = 0; m < M; ++m) {
        if (rng.uniform() < 0.5) edge.push_back(m);
      }
    }
    edges.push_back(std::move(edge));
  }
  return BipartiteDag(M, std::move(edges));
}

}  // namespace lsdp
