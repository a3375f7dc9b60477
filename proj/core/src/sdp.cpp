#include "lsdp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lsdp/families.hpp"

namespace lsdp {

namespace {

constexpr double kDecompositionPsdTol = 1e-9;

double sum_inner(const StructuredVariable& a, const StructuredVariable& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.r.size(); ++i) s += frobenius_inner(a.r[i], b.r[i]);
  for (std::size_t i = 0; i < a.c.size(); ++i) s += frobenius_inner(a.c[i], b.c[i]);
  return s;
}

Matrix& block_ref(StructuredVariable& z, std::size_t b) {
  return b < z.r.size() ? z.r[b] : z.c[b - z.r.size()];
}
const Matrix& block_ref(const StructuredVariable& z, std::size_t b) {
  return b < z.r.size() ? z.r[b] : z.c[b - z.r.size()];
}

void check_shapes(const StructuredVariable& z, const StructureLayout& layout) {
  if (z.r.size() != layout.num_observables() ||
      z.c.size() != layout.num_latents()) {
    throw std::invalid_argument("structured variable has the wrong block count");
  }
  for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
    const auto n = static_cast<Index>(layout.block(b).size());
    const Matrix& m = block_ref(z, b);
    if (m.rows() != n || m.cols() != n) {
      throw std::invalid_argument("structured variable block " +
                                  std::to_string(b) + " has the wrong size");
    }
  }
}

// Witness from the residual direction W o (A(Z) - Cov); the identity shift
// makes every block of A^dagger(X) PSD, since A^dagger(I) is all identities.
std::optional<Witness> try_certificate(const Matrix& residual,
                                       const BlockCovariance& cov,
                                       const StructureLayout& layout,
                                       const Tolerances& tol) {
  Matrix x = layout.weights().cwiseProduct(residual);
  x = symmetrize(x);
  double n = x.norm();
  if (!(n > 0.0) || !std::isfinite(n)) return std::nullopt;
  x /= n;
  const double shift =
      std::max(0.0, -min_block_eigenvalue(adjoint_map(x, layout)));
  x.diagonal().array() += shift;
  n = x.norm();
  x /= n;
  Witness w{x, frobenius_inner(x, cov.matrix),
            min_block_eigenvalue(adjoint_map(x, layout))};
  if (w.gap <= -tol.gap && w.dual_min_eig >= -tol.psd) return w;
  return std::nullopt;
}

StructuredVariable project_blocks(const StructuredVariable& z) {
  StructuredVariable out;
  out.r.reserve(z.r.size());
  out.c.reserve(z.c.size());
  for (const auto& m : z.r) out.r.push_back(project_psd(m));
  for (const auto& m : z.c) out.c.push_back(project_psd(m));
  return out;
}

// y - A^dagger(W o (A(y) - Cov)): the least-squares projection onto
// {A(Z) = Cov} on covered entries.
StructuredVariable affine_step(const StructuredVariable& y, const Matrix& cov,
                               const StructureLayout& layout) {
  const Matrix g =
      layout.weights().cwiseProduct(constraint_map(y, layout) - cov);
  StructuredVariable grad = adjoint_map(g, layout);
  StructuredVariable out = y;
  for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
    block_ref(out, b) -= block_ref(grad, b);
  }
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible:
      return "Feasible";
    case Verdict::CertifiedInfeasible:
      return "CertifiedInfeasible";
    case Verdict::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "Feasible") return Verdict::Feasible;
  if (s == "CertifiedInfeasible") return Verdict::CertifiedInfeasible;
  if (s == "Undecided") return Verdict::Undecided;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

std::string to_string(SolverKind k) {
  return k == SolverKind::Dykstra ? "dykstra" : "accelerated";
}

SolverKind parse_solver(const std::string& s) {
  if (s == "accelerated") return SolverKind::Accelerated;
  if (s == "dykstra") return SolverKind::Dykstra;
  throw std::invalid_argument("unknown solver '" + s +
                              "' (expected accelerated or dykstra)");
}

StructureLayout::StructureLayout(const BipartiteDag& dag,
                                 const BlockPartition& partition) {
  if (partition.num_blocks() != dag.num_observables()) {
    throw std::invalid_argument(
        "partition has " + std::to_string(partition.num_blocks()) +
        " blocks but the dag has " + std::to_string(dag.num_observables()) +
        " observables");
  }
  num_r_ = dag.num_observables();
  dim_ = partition.total();
  for (std::size_t m = 0; m < num_r_; ++m) {
    blocks_.push_back(partition.block_indices(m));
  }
  for (std::size_t n = 0; n < dag.num_latents(); ++n) {
    blocks_.push_back(support_indices(dag, partition, n));
  }
  const auto k = static_cast<Index>(dim_);
  coverage_ = Matrix::Zero(k, k);
  for (const auto& b : blocks_) {
    for (std::size_t i : b) {
      for (std::size_t j : b) {
        coverage_(static_cast<Index>(i), static_cast<Index>(j)) += 1.0;
      }
    }
  }
  weights_ = coverage_.unaryExpr([](double c) { return c > 0.0 ? 1.0 / c : 1.0; });
}

StructuredVariable zero_variable(const StructureLayout& layout) {
  StructuredVariable z;
  for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
    const auto n = static_cast<Index>(layout.block(b).size());
    (b < layout.num_observables() ? z.r : z.c).push_back(Matrix::Zero(n, n));
  }
  return z;
}

Matrix constraint_map(const StructuredVariable& z, const StructureLayout& layout) {
  check_shapes(z, layout);
  const auto k = static_cast<Index>(layout.dim());
  Matrix out = Matrix::Zero(k, k);
  for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
    add_submatrix(out, layout.block(b), block_ref(z, b));
  }
  return out;
}

Matrix constraint_map(const StructuredVariable& z, const BipartiteDag& dag,
                      const BlockPartition& partition) {
  return constraint_map(z, StructureLayout(dag, partition));
}

StructuredVariable adjoint_map(const Matrix& x, const StructureLayout& layout) {
  const auto k = static_cast<Index>(layout.dim());
  if (x.rows() != k || x.cols() != k) {
    throw std::invalid_argument("adjoint_map: matrix is " +
                                std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + ", expected " +
                                std::to_string(k) + "x" + std::to_string(k));
  }
  StructuredVariable z;
  for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
    (b < layout.num_observables() ? z.r : z.c)
        .push_back(submatrix(x, layout.block(b)));
  }
  return z;
}

StructuredVariable adjoint_map(const Matrix& x, const BipartiteDag& dag,
                               const BlockPartition& partition) {
  return adjoint_map(x, StructureLayout(dag, partition));
}

double inner_product(const StructuredVariable& a, const StructuredVariable& b) {
  if (a.r.size() != b.r.size() || a.c.size() != b.c.size()) {
    throw std::invalid_argument("inner_product: block count mismatch");
  }
  return sum_inner(a, b);
}

double min_block_eigenvalue(const StructuredVariable& z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : z.r) {
    if (m.size() > 0) best = std::min(best, min_eigenvalue(m));
  }
  for (const auto& m : z.c) {
    if (m.size() > 0) best = std::min(best, min_eigenvalue(m));
  }
  return best;
}

Decomposition embed(const StructuredVariable& z, const StructureLayout& layout) {
  check_shapes(z, layout);
  const auto k = static_cast<Index>(layout.dim());
  Decomposition d;
  d.remainder = Matrix::Zero(k, k);
  for (std::size_t m = 0; m < z.r.size(); ++m) {
    add_submatrix(d.remainder, layout.r_block(m), z.r[m]);
  }
  for (std::size_t n = 0; n < z.c.size(); ++n) {
    Matrix c = Matrix::Zero(k, k);
    add_submatrix(c, layout.c_block(n), z.c[n]);
    d.components.push_back(std::move(c));
  }
  return d;
}

WitnessCheck verify_witness(const Witness& witness, const BlockCovariance& cov,
                            const BipartiteDag& dag, const Tolerances& tol) {
  WitnessCheck out;
  const StructureLayout layout(dag, cov.partition);
  const auto k = static_cast<Index>(layout.dim());
  if (witness.x.rows() != k || witness.x.cols() != k ||
      !witness.x.allFinite()) {
    return out;
  }
  const Matrix x = symmetrize(witness.x);
  out.norm = x.norm();
  out.gap = frobenius_inner(x, cov.matrix);
  out.dual_min_eig = min_block_eigenvalue(adjoint_map(x, layout));
  out.valid = out.norm > 0.0 && out.dual_min_eig >= -tol.psd * out.norm &&
              out.gap <= -tol.gap;
  return out;
}

DecompositionCheck check_decomposition(const Decomposition& d,
                                       const BlockCovariance& cov,
                                       const BipartiteDag& dag,
                                       const Tolerances& tol) {
  DecompositionCheck out;
  const StructureLayout layout(dag, cov.partition);
  const auto k = static_cast<Index>(layout.dim());
  if (d.remainder.rows() != k || d.remainder.cols() != k ||
      d.components.size() != dag.num_latents()) {
    out.failure = "shape mismatch";
    return out;
  }
  for (const auto& c : d.components) {
    if (c.rows() != k || c.cols() != k) {
      out.failure = "shape mismatch";
      return out;
    }
  }
  const double scale = std::max(1.0, spectral_norm_sym(cov.matrix));

  // Allowed pattern for R: the diagonal blocks.
  Matrix mask = Matrix::Zero(k, k);
  for (std::size_t m = 0; m < layout.num_observables(); ++m) {
    for (std::size_t i : layout.r_block(m)) {
      for (std::size_t j : layout.r_block(m)) {
        mask(static_cast<Index>(i), static_cast<Index>(j)) = 1.0;
      }
    }
  }
  out.support_leak =
      (d.remainder.array() * (1.0 - mask.array())).abs().maxCoeff();
  out.min_eigenvalue = min_eigenvalue(d.remainder);
  Matrix total = d.remainder;
  for (std::size_t n = 0; n < d.components.size(); ++n) {
    mask.setZero();
    for (std::size_t i : layout.c_block(n)) {
      for (std::size_t j : layout.c_block(n)) {
        mask(static_cast<Index>(i), static_cast<Index>(j)) = 1.0;
      }
    }
    out.support_leak = std::max(
        out.support_leak,
        (d.components[n].array() * (1.0 - mask.array())).abs().maxCoeff());
    out.min_eigenvalue = std::min(out.min_eigenvalue, min_eigenvalue(d.components[n]));
    total += d.components[n];
  }
  out.residual = (total - cov.matrix).norm();

  if (out.support_leak > 1e-12 * scale) {
    out.failure = "a term has entries outside its support";
  } else if (out.min_eigenvalue < -kDecompositionPsdTol * scale) {
    out.failure = "a term is not positive semidefinite";
  } else if (out.residual >
             tol.feasibility * std::max(1.0, cov.matrix.norm())) {
    out.failure = "terms do not sum to the covariance";
  }
  out.valid = out.failure.empty();
  return out;
}

TestReport test_compatibility(const BlockCovariance& cov, const BipartiteDag& dag,
                              const Tolerances& tol, SolverKind solver) {
  validate_covariance(cov);
  const StructureLayout layout(dag, cov.partition);

  TestReport report;
  report.tolerances = tol;
  report.solver = solver;
  const double target = tol.feasibility * std::max(1.0, cov.matrix.norm());
  const std::size_t every = std::max<std::size_t>(1, tol.certificate_every);

  StructuredVariable z = zero_variable(layout);
  StructuredVariable y = z;        // momentum point (accelerated)
  StructuredVariable corr = z;     // Dykstra correction on the PSD set
  double t = 1.0;
  Matrix residual = -cov.matrix;
  report.residual = residual.norm();
  if (report.residual <= target) {
    report.verdict = Verdict::Feasible;
    report.decomposition = embed(z, layout);
    return report;
  }

  for (std::size_t k = 0; k < tol.max_iterations; ++k) {
    if (solver == SolverKind::Accelerated) {
      StructuredVariable zn = project_blocks(affine_step(y, cov.matrix, layout));
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      // Restart the momentum when the step points against the last move.
      double test = 0.0;
      for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
        test += frobenius_inner(block_ref(zn, b) - block_ref(z, b),
                                block_ref(y, b) - block_ref(zn, b));
      }
      if (test > 0.0) {
        t = 1.0;
        y = zn;
      } else {
        const double beta = (t - 1.0) / tn;
        y = zn;
        for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
          block_ref(y, b) += beta * (block_ref(zn, b) - block_ref(z, b));
        }
        t = tn;
      }
      z = std::move(zn);
    } else {
      StructuredVariable a = affine_step(z, cov.matrix, layout);
      for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
        block_ref(a, b) += block_ref(corr, b);
      }
      StructuredVariable zn = project_blocks(a);
      for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
        block_ref(corr, b) = block_ref(a, b) - block_ref(zn, b);
      }
      z = std::move(zn);
    }

    residual = constraint_map(z, layout) - cov.matrix;
    report.residual = residual.norm();
    report.iterations = k + 1;
    if (report.residual <= target) {
      report.verdict = Verdict::Feasible;
      report.decomposition = embed(z, layout);
      return report;
    }
    if (k % every == 0) {
      if (auto w = try_certificate(residual, cov, layout, tol)) {
        report.verdict = Verdict::CertifiedInfeasible;
        report.witness = std::move(*w);
        return report;
      }
    }
  }
  if (auto w = try_certificate(residual, cov, layout, tol)) {
    report.verdict = Verdict::CertifiedInfeasible;
    report.witness = std::move(*w);
  } else {
    report.verdict = Verdict::Undecided;
  }
  return report;
}

TestReport reduced_family_test(double p, const BipartiteDag& dag,
                               const Tolerances& tol, SolverKind solver) {
  const std::size_t M = dag.num_observables();
  BlockCovariance cov{BlockPartition::uniform(M, 1), c_matrix(M, p)};
  return test_compatibility(cov, dag, tol, solver);
}

}  // namespace lsdp
