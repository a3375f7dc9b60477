// lsdp: semidefinite compatibility tests for latent causal structures.
//
// Exit codes: 0 Feasible / success, 1 malformed input or usage,
// 2 CertifiedInfeasible, 3 Undecided, 4 verification failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "lsdp/lsdp.hpp"

using namespace lsdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUndecided = 3;
constexpr int kExitVerify = 4;

struct SolverFlags {
  Tolerances tol;
  std::string solver = "accelerated";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--tol-feas", tol.feasibility, "feasibility tolerance")
        ->envname("LSDP_TOL_FEAS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--tol-psd", tol.psd, "PSD tolerance for witnesses")
        ->envname("LSDP_TOL_PSD")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--tol-gap", tol.gap, "required witness gap")
        ->envname("LSDP_TOL_GAP")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--max-iter", tol.max_iterations, "iteration budget")
        ->envname("LSDP_MAX_ITER")
        ->capture_default_str();
    cmd.add_option("--solver", solver, "accelerated or dykstra")
        ->envname("LSDP_SOLVER")
        ->check(CLI::IsMember({"accelerated", "dykstra"}))
        ->capture_default_str();
  }

  SolverKind kind() const { return parse_solver(solver); }
};

std::size_t default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void add_jobs(CLI::App& cmd, std::size_t& jobs) {
  cmd.add_option("--jobs", jobs, "worker threads")
      ->envname("LSDP_JOBS")
      ->check(CLI::PositiveNumber);
}

// Randomized commands take --seed or draw one and print it.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (std::uint64_t{rd()} << 32) ^ rd();
  std::cerr << "seed: " << s << "\n";
  return s;
}

// Writes to `path`, or to stdout when it is empty or "-".
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError(path + ": cannot open for writing");
  write(f);
  if (!f) throw InputError(path + ": write failed");
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Feasible:
      return kExitOk;
    case Verdict::CertifiedInfeasible:
      return kExitInfeasible;
    case Verdict::Undecided:
      return kExitUndecided;
  }
  return kExitUndecided;
}

struct TestArgs {
  std::string cov_path;
  std::string dist_path;
  std::string dag_path;
  std::string feature_path;
  std::string out;
  bool emit_witness = false;
  bool no_decomposition = false;
  SolverFlags solver;
};

int run_test(const TestArgs& a) {
  const BipartiteDag dag = dag_from_json(load_json_file(a.dag_path));
  BlockCovariance cov;
  if (!a.cov_path.empty()) {
    cov = covariance_from_json(load_json_file(a.cov_path));
  } else {
    const auto dist = pmf_from_json(load_json_file(a.dist_path));
    const FeatureMap features = a.feature_path.empty()
                                    ? orthonormal_feature_map(dist.alphabet_sizes())
                                    : feature_map_from_json(load_json_file(a.feature_path));
    try {
      cov = covariance_from_distribution(dist, features);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("features: ") + e.what());
    }
  }
  if (cov.partition.num_blocks() != dag.num_observables()) {
    throw InputError("covariance has " + std::to_string(cov.partition.num_blocks()) +
                     " blocks but the dag has " + std::to_string(dag.num_observables()) +
                     " observables");
  }
  const auto report = test_compatibility(cov, dag, a.solver.tol, a.solver.kind());
  if (report.witness) {
    const auto check = verify_witness(*report.witness, cov, dag, a.solver.tol);
    std::cerr << "witness: gap " << check.gap << ", dual min eigenvalue " << check.dual_min_eig
              << (check.valid ? " (verified)" : " (NOT verified)") << "\n";
    if (!check.valid) return kExitVerify;
  }
  ReportOptions opts;
  opts.include_decomposition = !a.no_decomposition;
  opts.include_witness_matrix = a.emit_witness;
  const Json j = report_to_json(report, dag, cov.partition, opts);
  with_output(a.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  std::cerr << "verdict: " << to_string(report.verdict) << " after " << report.iterations
            << " iterations, residual " << report.residual << "\n";
  return exit_code(report.verdict);
}

struct SweepArgs {
  std::size_t alphabet = 2;
  std::size_t observables = 3;
  std::string grid = "0:1:0.01";
  std::string dag_path;
  std::string out;
  std::size_t jobs = default_jobs();
  SolverFlags solver;
};

int run_sweep(const SweepArgs& a) {
  const BipartiteDag dag =
      a.dag_path.empty() ? triangle_dag() : dag_from_json(load_json_file(a.dag_path));
  if (dag.num_observables() != a.observables) {
    throw InputError("--M " + std::to_string(a.observables) + " does not match the dag (" +
                     std::to_string(dag.num_observables()) + " observables)");
  }
  std::vector<double> grid;
  try {
    grid = parse_grid(a.grid);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--grid: ") + e.what());
  }
  const auto sweep = family_sweep(a.observables, a.alphabet, dag, grid, a.solver.tol, a.jobs);
  with_output(a.out, [&](std::ostream& o) { write_sweep_csv(o, sweep); });
  const auto show = [](const char* name, const std::optional<double>& t) {
    std::cerr << name << " transition: ";
    if (t) {
      std::cerr << *t << "\n";
    } else {
      std::cerr << "none on grid\n";
    }
  };
  show("semidefinite", sweep.transitions.semidefinite);
  if (a.observables == 3) {
    show("entropic", sweep.transitions.combined_entropic);
    show("E1", sweep.transitions.e1);
  }
  std::size_t undecided = 0;
  for (const auto& r : sweep.rows) undecided += r.verdict == Verdict::Undecided;
  return undecided ? kExitUndecided : kExitOk;
}

struct BenchArgs {
  std::size_t instances = 10000;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = default_jobs();
  std::string out;
  std::string summary;
  SolverFlags solver;
};

int run_bench(const BenchArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  const auto b = ising_benchmark(a.instances, seed, a.jobs, a.solver.tol);
  with_output(a.out, [&](std::ostream& o) { write_rate_table_csv(o, b); });
  if (!a.summary.empty()) {
    Json rates = Json::object();
    for (std::size_t t = 0; t < kIsingTestNames.size(); ++t) rates[kIsingTestNames[t]] = b.rate(t);
    const Json j = {{"schema", "lsdp.bench/1"},
                    {"instances", b.instances},
                    {"seed", b.seed},
                    {"rates", rates},
                    {"containment_violations", b.containment_violations},
                    {"undecided", b.undecided},
                    {"invalid_witnesses", b.invalid_witnesses},
                    {"tolerances",
                     {{"feasibility", a.solver.tol.feasibility},
                      {"psd", a.solver.tol.psd},
                      {"gap", a.solver.tol.gap},
                      {"max_iterations", a.solver.tol.max_iterations}}},
                    {"wall_seconds", b.wall_seconds}};
    with_output(a.summary, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  }
  std::cerr << b.instances << " instances in " << b.wall_seconds << " s; undecided "
            << b.undecided << ", containment violations " << b.containment_violations
            << ", invalid witnesses " << b.invalid_witnesses << "\n";
  if (b.invalid_witnesses > 0) return kExitVerify;
  return b.undecided ? kExitUndecided : kExitOk;
}

struct RealizeArgs {
  std::string report_path;
  std::string cov_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_realize(const RealizeArgs& a) {
  const auto parsed = report_from_json(load_json_file(a.report_path));
  if (parsed.report.verdict != Verdict::Feasible) {
    throw InputError("report: verdict is " + to_string(parsed.report.verdict) +
                     ", need Feasible");
  }
  if (!parsed.report.decomposition) throw InputError("report: no decomposition");
  const auto& d = *parsed.report.decomposition;
  const std::uint64_t seed = resolve_seed(a.seed);
  VectorLatentModel model;
  try {
    model = realize(d, parsed.dag, parsed.partition, seed);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("report.decomposition: ") + e.what());
  }
  Matrix target = d.remainder;
  for (const auto& c : d.components) target += c;
  const Matrix got = model.covariance();
  const double err = (got - target).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, target.norm());
  bool ok = err <= 1e-9 * scale;
  std::cerr << "verification: max |Cov(model) - (R + sum C_n)| = " << err;
  if (!a.cov_path.empty()) {
    const auto cov = covariance_from_json(load_json_file(a.cov_path));
    if (cov.partition != parsed.partition) throw InputError("--cov: dims differ from the report");
    const double res = (got - cov.matrix).norm();
    const double bound = parsed.report.tolerances.feasibility * std::max(1.0, cov.matrix.norm());
    std::cerr << ", |Cov(model) - Cov|_F = " << res;
    ok = ok && res <= bound;
  }
  std::cerr << (ok ? " (ok)" : " (FAILED)") << "\n";
  if (!ok) return kExitVerify;
  Json j = model_to_json(model);
  j["seed"] = seed;
  with_output(a.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  return kExitOk;
}

struct ScanArgs {
  std::size_t d_min = 2;
  std::size_t d_max = 40;
  double step = 1e-3;
  std::size_t jobs = default_jobs();
  std::string out;
};

int run_scan(const ScanArgs& a) {
  if (a.d_min < 2 || a.d_max < a.d_min) throw InputError("need 2 <= --dmin <= --dmax");
  const auto scan = alphabet_scan(a.d_min, a.d_max, a.step, a.jobs);
  with_output(a.out, [&](std::ostream& o) {
    o << "D,entropic_transition,entropic_grid_transition,e1_root,semidefinite_threshold\n";
    o.precision(12);
    for (const auto& r : scan.rows) {
      o << r.alphabet_size << "," << r.combined << "," << r.grid << "," << r.e1 << ","
        << triangle_threshold() << "\n";
    }
  });
  const auto show = [](const std::optional<std::size_t>& d) {
    return d ? std::to_string(*d) : std::string("none");
  };
  std::cerr << "first D above 1-1/sqrt(2): " << show(scan.first_exceeding) << " (grid step "
            << a.step << ": " << show(scan.first_exceeding_grid) << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semidefinite tests for latent causal structures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lsdp 0.1.0");

  TestArgs test;
  auto* t = app.add_subcommand("test", "test a covariance or distribution against a dag");
  auto* cov_opt = t->add_option("--cov", test.cov_path, "covariance JSON")->check(CLI::ExistingFile);
  auto* dist_opt =
      t->add_option("--dist", test.dist_path, "distribution JSON")->check(CLI::ExistingFile);
  cov_opt->excludes(dist_opt);
  t->add_option("--dag", test.dag_path, "dag JSON")->required()->check(CLI::ExistingFile);
  t->add_option("--feature", test.feature_path, "feature map JSON (with --dist)")
      ->needs(dist_opt)
      ->check(CLI::ExistingFile);
  t->add_flag("--emit-witness", test.emit_witness, "include the witness matrix");
  t->add_flag("--no-decomposition", test.no_decomposition, "omit the decomposition");
  t->add_option("--out", test.out, "report path (default stdout)");
  test.solver.add_to(*t);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "verdicts and E-values along the correlated family");
  s->add_option("--D", sweep.alphabet, "alphabet size")->check(CLI::Range(2, 1000));
  s->add_option("--M", sweep.observables, "number of observables")->check(CLI::Range(2, 10));
  s->add_option("--grid", sweep.grid, "p grid a:b:step")->capture_default_str();
  s->add_option("--dag", sweep.dag_path, "dag JSON (default triangle)")->check(CLI::ExistingFile);
  s->add_option("--out", sweep.out, "CSV path (default stdout)");
  add_jobs(*s, sweep.jobs);
  sweep.solver.add_to(*s);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "rejection rates on random Ising triples");
  b->add_option("--instances", bench.instances, "ensemble size")->capture_default_str();
  b->add_option("--seed", bench.seed, "ensemble seed")->envname("LSDP_SEED");
  b->add_option("--out", bench.out, "rate table CSV (default stdout)");
  b->add_option("--summary", bench.summary, "JSON summary path");
  add_jobs(*b, bench.jobs);
  bench.solver.add_to(*b);

  RealizeArgs real;
  auto* r = app.add_subcommand("realize", "build a latent model from a Feasible report");
  r->add_option("--report", real.report_path, "report JSON")->required()->check(CLI::ExistingFile);
  r->add_option("--cov", real.cov_path, "also verify against this covariance")
      ->check(CLI::ExistingFile);
  r->add_option("--seed", real.seed, "seed for the finite alphabets")->envname("LSDP_SEED");
  r->add_option("--out", real.out, "model JSON path (default stdout)");

  ScanArgs scan;
  auto* sc = app.add_subcommand("scan", "entropic transition against alphabet size");
  sc->add_option("--dmin", scan.d_min, "smallest D")->capture_default_str();
  sc->add_option("--dmax", scan.d_max, "largest D")->capture_default_str();
  sc->add_option("--step", scan.step, "grid step for the grid transition")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sc->add_option("--out", scan.out, "CSV path (default stdout)");
  add_jobs(*sc, scan.jobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (t->parsed()) {
      if (test.cov_path.empty() && test.dist_path.empty()) {
        throw InputError("test: one of --cov or --dist is required");
      }
      return run_test(test);
    }
    if (s->parsed()) return run_sweep(sweep);
    if (b->parsed()) return run_bench(bench);
    if (r->parsed()) return run_realize(real);
    if (sc->parsed()) return run_scan(scan);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
