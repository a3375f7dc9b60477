#pragma once

#include <cstddef>

#include "lsdp/feature_covariance.hpp"
#include "lsdp/linalg.hpp"

namespace lsdp {

/// M x M matrix with unit diagonal and (1 - p)^2 off the diagonal.
/// Throws std::invalid_argument unless 0 <= p <= 1 and M >= 1.
Matrix c_matrix(std::size_t num_variables, double p);

/// Q = I - c c^T with c = (1,...,1)/sqrt(D): the projector onto the
/// complement of the constant vector.
Matrix q_matrix(std::size_t alphabet_size);

/// Covariance of family_pmd(M, D, p) under orthonormal feature maps, built
/// as (1/D) C(p) (x) Q. Observable m occupies rows m*D .. m*D + D - 1, so
/// block (m, m') is C(p)_{mm'} Q / D.
BlockCovariance family_covariance(std::size_t num_variables,
                                  std::size_t alphabet_size, double p);

/// 1 - 1/sqrt(2).
double triangle_threshold();

/// [[1/2, (1-p)^2], [(1-p)^2, 1/2]].
Matrix triangle_pair_matrix(double p);

/// Closed-form PSD condition of triangle_pair_matrix: 1 - 1/sqrt(2) <= p <= 1 + 1/sqrt(2).
bool triangle_pair_psd(double p);

}  // namespace lsdp
