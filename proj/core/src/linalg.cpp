#include "lsdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsdp {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& m,
                                          bool vectors = true) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(
      symmetrize(m), vectors ? Eigen::ComputeEigenvectors
                             : Eigen::EigenvaluesOnly);
}

}  // namespace

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  return eig(m, false).eigenvalues().minCoeff();
}

double spectral_norm_sym(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return eig(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

Matrix project_psd(const Matrix& m) {
  if (m.size() == 0) return m;
  const auto es = eig(m);
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix psd_sqrt(const Matrix& m) {
  if (m.size() == 0) return m;
  const auto es = eig(m);
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

std::size_t numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  const Vector ev = eig(m, false).eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0;
  return static_cast<std::size_t>(
      (ev.array().abs() > rel_tol * top).count());
}

bool is_psd(const Matrix& m, double abs_tol) {
  return min_eigenvalue(m) >= -abs_tol;
}

Matrix submatrix(const Matrix& m, const std::vector<std::size_t>& idx) {
  const auto n = static_cast<Index>(idx.size());
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out(i, j) = m(static_cast<Index>(idx[i]), static_cast<Index>(idx[j]));
    }
  }
  return out;
}

void add_submatrix(Matrix& target, const std::vector<std::size_t>& idx,
                   const Matrix& block) {
  const auto n = static_cast<Index>(idx.size());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      target(static_cast<Index>(idx[i]), static_cast<Index>(idx[j])) +=
          block(i, j);
    }
  }
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

Matrix spd_inverse(const Matrix& m, double floor_rel) {
  const auto es = eig(m);
  const Vector& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() < floor_rel * top) {
    throw std::domain_error("spd_inverse: matrix is singular to tolerance");
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace lsdp
