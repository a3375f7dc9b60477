#include "lsdp/families.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lsdp {

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

Matrix c_matrix(std::size_t num_variables, double p) {
  check_p(p);
  if (num_variables == 0) throw std::invalid_argument("c_matrix: M must be >= 1");
  const auto n = static_cast<Index>(num_variables);
  const double off = (1.0 - p) * (1.0 - p);
  Matrix c = Matrix::Constant(n, n, off);
  c.diagonal().setOnes();
  return c;
}

Matrix q_matrix(std::size_t alphabet_size) {
  if (alphabet_size == 0) throw std::invalid_argument("q_matrix: D must be >= 1");
  const auto d = static_cast<Index>(alphabet_size);
  return Matrix::Identity(d, d) -
         Matrix::Constant(d, d, 1.0 / static_cast<double>(alphabet_size));
}

BlockCovariance family_covariance(std::size_t num_variables,
                                  std::size_t alphabet_size, double p) {
  if (alphabet_size < 2) {
    throw std::invalid_argument("family_covariance: D must be >= 2");
  }
  const Matrix c = c_matrix(num_variables, p);
  const Matrix q = q_matrix(alphabet_size) / static_cast<double>(alphabet_size);
  const auto d = static_cast<Index>(alphabet_size);
  const auto n = static_cast<Index>(num_variables);
  Matrix cov(n * d, n * d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) cov.block(i * d, j * d, d, d) = c(i, j) * q;
  }
  return {BlockPartition::uniform(num_variables, alphabet_size), cov};
}

double triangle_threshold() { return 1.0 - 1.0 / std::sqrt(2.0); }

Matrix triangle_pair_matrix(double p) {
  const double off = (1.0 - p) * (1.0 - p);
  Matrix m(2, 2);
  m << 0.5, off, off, 0.5;
  return m;
}

bool triangle_pair_psd(double p) {
  return p >= 1.0 - 1.0 / std::sqrt(2.0) && p <= 1.0 + 1.0 / std::sqrt(2.0);
}

}  // namespace lsdp
