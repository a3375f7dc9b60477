#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lsdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Smallest eigenvalue of the symmetric part of m; +inf for an empty matrix.
double min_eigenvalue(const Matrix& m);

/// Largest absolute eigenvalue of the symmetric part of m.
double spectral_norm_sym(const Matrix& m);

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
Matrix project_psd(const Matrix& m);

/// Principal square root of a PSD matrix; negative eigenvalues are clipped.
Matrix psd_sqrt(const Matrix& m);

/// Number of eigenvalues above rel_tol * max(|lambda|). Zero matrix has rank 0.
std::size_t numerical_rank(const Matrix& m, double rel_tol = 1e-10);

/// True when min eigenvalue >= -abs_tol.
bool is_psd(const Matrix& m, double abs_tol);

/// Largest |a_ij - a_ji|.
double asymmetry(const Matrix& m);

Matrix symmetrize(const Matrix& m);

/// m restricted to rows/cols idx.
Matrix submatrix(const Matrix& m, const std::vector<std::size_t>& idx);

/// target(idx, idx) += block.
void add_submatrix(Matrix& target, const std::vector<std::size_t>& idx,
                   const Matrix& block);

/// Frobenius inner product tr(a^T b).
double frobenius_inner(const Matrix& a, const Matrix& b);

/// Inverse of a symmetric positive definite matrix via eigendecomposition.
/// Throws std::domain_error if an eigenvalue is below floor_rel * lambda_max.
Matrix spd_inverse(const Matrix& m, double floor_rel);

}  // namespace lsdp
