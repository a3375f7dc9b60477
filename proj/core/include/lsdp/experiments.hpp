#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsdp/causal_graph.hpp"
#include "lsdp/feature_covariance.hpp"
#include "lsdp/inequality_tests.hpp"
#include "lsdp/sdp.hpp"

namespace lsdp {

/// Runs body(i) for i in [0, count) on `jobs` threads. Results must be
/// written by index so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& body);

inline constexpr std::array<const char*, 8> kIsingTestNames = {
    "E1", "E2", "E3", "E4", "E5", "E6", "Combined", "Semidefinite"};
inline constexpr std::array<double, 8> kReferenceIsingRates = {
    0.57, 0.60, 0.54, 0.63, 0.40, 0.60, 0.64, 0.77};

struct IsingInstance {
  Eigen::Matrix3d coupling;
  EntropicValues values;
  EntropicRejections rejections;
  Verdict verdict = Verdict::Undecided;
  std::size_t iterations = 0;
  bool witness_valid = false;  // only meaningful for CertifiedInfeasible
};

/// Instance i of the ensemble: coupling from random_ising(seed, i), exact
/// pmf, orthonormal 6 x 6 covariance, triangle test and the 12 E-values.
IsingInstance ising_instance(std::uint64_t seed, std::size_t index,
                             const Tolerances& tol = {});

struct IsingBenchmark {
  std::size_t instances = 0;
  std::uint64_t seed = 0;
  std::array<std::size_t, 8> rejections{};  // in kIsingTestNames order
  std::size_t containment_violations = 0;  // entropic reject, SDP accept
  std::size_t undecided = 0;
  std::size_t invalid_witnesses = 0;
  double wall_seconds = 0.0;
  std::vector<IsingInstance> rows;  // filled when keep_rows

  double rate(std::size_t test) const;
};

IsingBenchmark ising_benchmark(std::size_t num_instances, std::uint64_t seed,
                               std::size_t jobs = 1, const Tolerances& tol = {},
                               bool keep_rows = false);

/// test,rejections,instances,rate,reference_rate
void write_rate_table_csv(std::ostream& out, const IsingBenchmark& b);

struct SweepRow {
  double p = 0.0;
  Verdict verdict = Verdict::Undecided;
  std::size_t iterations = 0;
  bool witness_valid = false;
  std::optional<EntropicValues> values;  // only for three observables
  bool entropic_reject = false;
};

struct SweepTransitions {
  // Smallest accepted p, refined by bisection between the flipping grid
  // points. Empty when no flip occurs on the grid.
  std::optional<double> semidefinite;
  std::optional<double> combined_entropic;
  std::optional<double> e1;
};

struct FamilySweep {
  std::vector<SweepRow> rows;
  SweepTransitions transitions;
};

/// Verdicts for family_pmd(M, D, p) under dag with orthonormal features at
/// every grid point, plus the E-values when M == 3.
FamilySweep family_sweep(std::size_t num_variables, std::size_t alphabet_size,
                         const BipartiteDag& dag, const std::vector<double>& grid,
                         const Tolerances& tol = {}, std::size_t jobs = 1);

/// Parses "a:b:step" into a+k*step for k = 0.. while <= b (+1e-12).
std::vector<double> parse_grid(const std::string& spec);

/// p,verdict,iterations,witness_valid,e1_1,e1_2,e1_3,e2_1,e2_2,e2_3,e3,
/// e4_1,e4_2,e4_3,e5,e6,entropic_reject
void write_sweep_csv(std::ostream& out, const FamilySweep& sweep);

struct ThresholdResult {
  double threshold = 0.0;
  std::size_t evaluations = 0;
};

/// Smallest p in [0, 1] whose covariance is Feasible, to within `precision`.
/// A coarse grid is checked first; any accept-then-reject pattern or an
/// Undecided verdict throws std::logic_error. Returns 0 when p = 0 is
/// already Feasible; throws std::domain_error when p = 1 is not.
ThresholdResult threshold_bisect(
    const BipartiteDag& dag, const std::function<BlockCovariance(double)>& family,
    double precision = 1e-4, const Tolerances& tol = {});

/// The 12 E-values of family_pmd(3, D, p).
EntropicValues family_entropic_values(std::size_t alphabet_size, double p);

/// Smallest p at which no entropic test rejects family_pmd(3, D, p), by
/// bisection to `precision` after a monotonicity check on a coarse grid.
double entropic_transition(std::size_t alphabet_size, double precision = 1e-10);

/// Smallest point of the grid 0, step, 2 step, ... at which no entropic
/// test rejects.
double entropic_grid_transition(std::size_t alphabet_size, double step);

struct AlphabetScanRow {
  std::size_t alphabet_size = 0;
  double combined = 0.0;  // entropic_transition
  double grid = 0.0;      // entropic_grid_transition
  double e1 = 0.0;        // e1_root
};

struct AlphabetScan {
  std::vector<AlphabetScanRow> rows;
  std::optional<std::size_t> first_exceeding;       // exact transition
  std::optional<std::size_t> first_exceeding_grid;  // grid transition
};

/// Entropic transitions for D = d_min..d_max against 1 - 1/sqrt(2).
AlphabetScan alphabet_scan(std::size_t d_min, std::size_t d_max,
                           double grid_step = 1e-3, std::size_t jobs = 1);

}  // namespace lsdp
