#include "lsdp/feature_covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lsdp {

namespace {

constexpr double kUniversalFloor = 1e-10;
constexpr double kGramInverseFloor = 1e-12;
constexpr double kRouteTol = 1e-9;

Vector marginal_vector(const DiscreteDistribution& dist, std::size_t m) {
  const auto single = marginalize(dist, {m});
  return Eigen::Map<const Vector>(single.pmf().data(),
                                  static_cast<Index>(single.size()));
}

// D_m x D_m' matrix of P(O_m = x, O_m' = x') - P(x) P(x').
Matrix centered_joint(const DiscreteDistribution& dist, std::size_t m,
                      std::size_t mp, const Vector& pm, const Vector& pmp) {
  const auto pair = marginalize(dist, {m, mp});
  const auto rows = static_cast<Index>(dist.alphabet_size(m));
  const auto cols = static_cast<Index>(dist.alphabet_size(mp));
  Matrix joint(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      joint(i, j) = pair[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return joint - pm * pmp.transpose();
}

Matrix gram_inverse(const Matrix& vectors, std::size_t m) {
  if (vectors.rows() != vectors.cols()) {
    throw std::domain_error("feature map for observable " + std::to_string(m) +
                            " is not universal: dimension " +
                            std::to_string(vectors.rows()) + " != alphabet " +
                            std::to_string(vectors.cols()));
  }
  try {
    return spd_inverse(vectors.transpose() * vectors, kGramInverseFloor);
  } catch (const std::domain_error&) {
    throw std::domain_error("feature map for observable " + std::to_string(m) +
                            " is not universal: Gram matrix is singular");
  }
}

}  // namespace

FeatureMap::FeatureMap(std::vector<Matrix> per_observable)
    : maps_(std::move(per_observable)) {
  for (std::size_t m = 0; m < maps_.size(); ++m) {
    if (maps_[m].rows() == 0 || maps_[m].cols() == 0) {
      throw std::invalid_argument("FeatureMap: observable " +
                                  std::to_string(m) + " has no vectors");
    }
    if (!maps_[m].allFinite()) {
      throw std::invalid_argument("FeatureMap: observable " +
                                  std::to_string(m) + " has non-finite entries");
    }
  }
}

BlockPartition FeatureMap::partition() const {
  std::vector<std::size_t> dims;
  for (std::size_t m = 0; m < maps_.size(); ++m) dims.push_back(feature_dim(m));
  return BlockPartition(std::move(dims));
}

bool FeatureMap::is_universal(std::size_t m) const {
  const Matrix& y = maps_.at(m);
  if (y.rows() != y.cols()) return false;
  const Vector ev =
      Eigen::SelfAdjointEigenSolver<Matrix>(y.transpose() * y,
                                            Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double top = ev.maxCoeff();
  return top > 0.0 && ev.minCoeff() >= kUniversalFloor * top;
}

bool FeatureMap::is_universal() const {
  for (std::size_t m = 0; m < maps_.size(); ++m) {
    if (!is_universal(m)) return false;
  }
  return true;
}

FeatureMap orthonormal_feature_map(
    const std::vector<std::size_t>& alphabet_sizes) {
  std::vector<Matrix> maps;
  maps.reserve(alphabet_sizes.size());
  for (std::size_t d : alphabet_sizes) {
    const auto n = static_cast<Index>(d);
    maps.push_back(Matrix::Identity(n, n));
  }
  return FeatureMap(std::move(maps));
}

Matrix BlockCovariance::block(std::size_t m, std::size_t mp) const {
  return matrix.block(static_cast<Index>(partition.offset(m)),
                      static_cast<Index>(partition.offset(mp)),
                      static_cast<Index>(partition.dim(m)),
                      static_cast<Index>(partition.dim(mp)));
}

void validate_covariance(const BlockCovariance& cov) {
  const auto k = static_cast<Index>(cov.partition.total());
  if (cov.matrix.rows() != k || cov.matrix.cols() != k) {
    throw std::invalid_argument(
        "covariance is " + std::to_string(cov.matrix.rows()) + "x" +
        std::to_string(cov.matrix.cols()) + " but the partition needs " +
        std::to_string(k) + "x" + std::to_string(k));
  }
  if (!cov.matrix.allFinite()) {
    throw std::invalid_argument("covariance has non-finite entries");
  }
  const double scale = std::max(1.0, cov.matrix.cwiseAbs().maxCoeff());
  if (asymmetry(cov.matrix) > 1e-12 * scale) {
    throw std::invalid_argument("covariance is not symmetric");
  }
  const double norm = spectral_norm_sym(cov.matrix);
  if (min_eigenvalue(cov.matrix) < -1e-9 * norm) {
    throw std::invalid_argument("covariance is not positive semidefinite");
  }
}

BlockCovariance covariance_from_distribution(const DiscreteDistribution& dist,
                                             const FeatureMap& features) {
  const std::size_t nvars = dist.num_variables();
  if (features.num_observables() != nvars) {
    throw std::invalid_argument(
        "covariance_from_distribution: feature map covers " +
        std::to_string(features.num_observables()) + " observables, pmf has " +
        std::to_string(nvars));
  }
  for (std::size_t m = 0; m < nvars; ++m) {
    if (features.alphabet_size(m) != dist.alphabet_size(m)) {
      throw std::invalid_argument(
          "covariance_from_distribution: observable " + std::to_string(m) +
          " has alphabet " + std::to_string(dist.alphabet_size(m)) +
          " but the feature map assigns " +
          std::to_string(features.alphabet_size(m)) + " vectors");
    }
  }
  BlockCovariance cov{features.partition(), Matrix()};
  const auto k = static_cast<Index>(cov.partition.total());
  cov.matrix = Matrix::Zero(k, k);

  std::vector<Vector> marg(nvars);
  for (std::size_t m = 0; m < nvars; ++m) marg[m] = marginal_vector(dist, m);

  for (std::size_t m = 0; m < nvars; ++m) {
    const Matrix& ym = features.vectors(m);
    const auto om = static_cast<Index>(cov.partition.offset(m));
    const Matrix q = Matrix(marg[m].asDiagonal()) - marg[m] * marg[m].transpose();
    const Matrix diag = ym * q * ym.transpose();
    cov.matrix.block(om, om, ym.rows(), ym.rows()) = symmetrize(diag);
    for (std::size_t mp = m + 1; mp < nvars; ++mp) {
      const Matrix& ymp = features.vectors(mp);
      const auto omp = static_cast<Index>(cov.partition.offset(mp));
      const Matrix cross =
          ym * centered_joint(dist, m, mp, marg[m], marg[mp]) * ymp.transpose();
      cov.matrix.block(om, omp, ym.rows(), ymp.rows()) = cross;
      cov.matrix.block(omp, om, ymp.rows(), ym.rows()) = cross.transpose();
    }
  }
  return cov;
}

std::vector<Matrix> transport_map(const FeatureMap& from, const FeatureMap& to) {
  if (from.num_observables() != to.num_observables()) {
    throw std::invalid_argument("transport_map: observable count mismatch");
  }
  std::vector<Matrix> maps;
  for (std::size_t m = 0; m < from.num_observables(); ++m) {
    if (from.alphabet_size(m) != to.alphabet_size(m)) {
      throw std::invalid_argument("transport_map: alphabet mismatch at " +
                                  std::to_string(m));
    }
    const Matrix& y = from.vectors(m);
    maps.push_back(to.vectors(m) * gram_inverse(y, m) * y.transpose());
  }
  return maps;
}

BlockCovariance transport_covariance(const BlockCovariance& cov,
                                     const std::vector<Matrix>& maps) {
  const std::size_t nblocks = cov.partition.num_blocks();
  if (maps.size() != nblocks) {
    throw std::invalid_argument("transport_covariance: map count mismatch");
  }
  std::vector<std::size_t> dims;
  for (std::size_t m = 0; m < nblocks; ++m) {
    if (static_cast<std::size_t>(maps[m].cols()) != cov.partition.dim(m)) {
      throw std::invalid_argument("transport_covariance: map " +
                                  std::to_string(m) + " has wrong input size");
    }
    dims.push_back(static_cast<std::size_t>(maps[m].rows()));
  }
  BlockPartition out_part(dims);
  const auto k = static_cast<Index>(out_part.total());
  Matrix phi = Matrix::Zero(k, static_cast<Index>(cov.partition.total()));
  for (std::size_t m = 0; m < nblocks; ++m) {
    phi.block(static_cast<Index>(out_part.offset(m)),
              static_cast<Index>(cov.partition.offset(m)), maps[m].rows(),
              maps[m].cols()) = maps[m];
  }
  return {out_part, symmetrize(phi * cov.matrix * phi.transpose())};
}

PushforwardCovariance pushforward_covariance(
    const DiscreteDistribution& dist, const FeatureMap& from,
    const std::vector<LocalChannel>& channels, const FeatureMap& to) {
  const std::size_t nvars = dist.num_variables();
  if (from.num_observables() != nvars || to.num_observables() != nvars ||
      channels.size() != nvars) {
    throw std::invalid_argument("pushforward_covariance: size mismatch");
  }
  PushforwardCovariance out;
  const BlockCovariance before = covariance_from_distribution(dist, from);
  for (std::size_t m = 0; m < nvars; ++m) {
    const LocalChannel& ch = channels[m];
    if (ch.input_size() != dist.alphabet_size(m) ||
        ch.output_size() != to.alphabet_size(m)) {
      throw std::invalid_argument("pushforward_covariance: channel " +
                                  std::to_string(m) + " has the wrong shape");
    }
    const Matrix& y = from.vectors(m);
    const Matrix& ty = to.vectors(m);
    out.psi.push_back(ty * ch.table() * gram_inverse(y, m) * y.transpose());

    const Vector pm = marginal_vector(dist, m);
    const Vector out_marg = ch.table() * pm;
    const Matrix spread = Matrix(out_marg.asDiagonal()) -
                          ch.table() * pm.asDiagonal() * ch.table().transpose();
    Matrix w = symmetrize(ty * spread * ty.transpose());
    const double wn = std::max(1.0, spectral_norm_sym(w));
    if (min_eigenvalue(w) < -1e-12 * wn) {
      throw std::logic_error("pushforward_covariance: correction W_" +
                             std::to_string(m) + " is not PSD");
    }
    out.corrections.push_back(std::move(w));
  }
  out.composed = transport_covariance(before, out.psi);
  for (std::size_t m = 0; m < nvars; ++m) {
    const auto o = static_cast<Index>(out.composed.partition.offset(m));
    const auto d = out.corrections[m].rows();
    out.composed.matrix.block(o, o, d, d) += out.corrections[m];
  }
  out.direct =
      covariance_from_distribution(apply_local_channels(dist, channels), to);
  out.discrepancy =
      (out.composed.matrix - out.direct.matrix).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, out.direct.matrix.cwiseAbs().maxCoeff());
  if (out.discrepancy > kRouteTol * scale) {
    throw std::logic_error(
        "pushforward_covariance: psi/W route disagrees with direct route by " +
        std::to_string(out.discrepancy));
  }
  return out;
}

}  // namespace lsdp
