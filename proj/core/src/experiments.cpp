#include "lsdp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lsdp/distributions.hpp"
#include "lsdp/families.hpp"

namespace lsdp {

namespace {

constexpr double kCoarseStep = 0.01;

BlockCovariance family_cov_from_pmf(std::size_t m, std::size_t d, double p) {
  const auto dist = family_pmd(m, d, p);
  return covariance_from_distribution(
      dist, orthonormal_feature_map(dist.alphabet_sizes()));
}

bool entropic_accepts(std::size_t d, double p) {
  return !entropic_rejections(family_entropic_values(d, p)).combined();
}

// Smallest accepted point between a rejected `lo` and an accepted `hi`.
template <typename Accepts>
double bisect(double lo, double hi, double precision, Accepts accepts,
              std::size_t* evaluations = nullptr) {
  while (hi - lo > precision) {
    const double mid = 0.5 * (lo + hi);
    if (evaluations) ++*evaluations;
    if (accepts(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

IsingInstance ising_instance(std::uint64_t seed, std::size_t index,
                             const Tolerances& tol) {
  IsingInstance row;
  row.coupling = random_ising(seed, index);
  const auto dist = ising_distribution(row.coupling);
  row.values = entropic_tests(entropy_profile(dist));
  row.rejections = entropic_rejections(row.values);
  const auto cov =
      covariance_from_distribution(dist, orthonormal_feature_map({2, 2, 2}));
  const auto dag = triangle_dag();
  const auto report = test_compatibility(cov, dag, tol);
  row.verdict = report.verdict;
  row.iterations = report.iterations;
  if (report.witness) {
    row.witness_valid = verify_witness(*report.witness, cov, dag, tol).valid;
  }
  return row;
}

double IsingBenchmark::rate(std::size_t test) const {
  return instances == 0 ? 0.0
                        : static_cast<double>(rejections.at(test)) /
                              static_cast<double>(instances);
}

IsingBenchmark ising_benchmark(std::size_t num_instances, std::uint64_t seed,
                               std::size_t jobs, const Tolerances& tol,
                               bool keep_rows) {
  if (num_instances == 0) {
    throw std::invalid_argument("ising_benchmark: need at least one instance");
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<IsingInstance> rows(num_instances);
  parallel_for(num_instances, jobs,
               [&](std::size_t i) { rows[i] = ising_instance(seed, i, tol); });

  IsingBenchmark out;
  out.instances = num_instances;
  out.seed = seed;
  for (const auto& r : rows) {
    const auto& e = r.rejections;
    const bool sdp_reject = r.verdict == Verdict::CertifiedInfeasible;
    const std::array<bool, 8> flags = {e.e1, e.e2, e.e3, e.e4,
                                       e.e5, e.e6, e.combined(), sdp_reject};
    for (std::size_t t = 0; t < flags.size(); ++t) out.rejections[t] += flags[t];
    if (e.combined() && r.verdict == Verdict::Feasible) ++out.containment_violations;
    if (r.verdict == Verdict::Undecided) ++out.undecided;
    if (sdp_reject && !r.witness_valid) ++out.invalid_witnesses;
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (keep_rows) out.rows = std::move(rows);
  return out;
}

void write_rate_table_csv(std::ostream& out, const IsingBenchmark& b) {
  out << "test,rejections,instances,rate,reference_rate\n";
  for (std::size_t t = 0; t < kIsingTestNames.size(); ++t) {
    out << kIsingTestNames[t] << ',' << b.rejections[t] << ',' << b.instances
        << ',' << fmt(b.rate(t)) << ',' << kReferenceIsingRates[t] << '\n';
  }
}

FamilySweep family_sweep(std::size_t num_variables, std::size_t alphabet_size,
                         const BipartiteDag& dag, const std::vector<double>& grid,
                         const Tolerances& tol, std::size_t jobs) {
  if (dag.num_observables() != num_variables) {
    throw std::invalid_argument("family_sweep: dag does not have M observables");
  }
  FamilySweep sweep;
  sweep.rows.resize(grid.size());
  const bool entropic = num_variables == 3;
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    SweepRow& row = sweep.rows[i];
    row.p = grid[i];
    const auto cov = family_cov_from_pmf(num_variables, alphabet_size, row.p);
    const auto report = test_compatibility(cov, dag, tol);
    row.verdict = report.verdict;
    row.iterations = report.iterations;
    if (report.witness) {
      row.witness_valid = verify_witness(*report.witness, cov, dag, tol).valid;
    }
    if (entropic) {
      row.values = family_entropic_values(alphabet_size, row.p);
      row.entropic_reject = entropic_rejections(*row.values).combined();
    }
  });

  auto& tr = sweep.transitions;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    const auto& a = sweep.rows[i - 1];
    const auto& b = sweep.rows[i];
    if (!tr.semidefinite && a.verdict == Verdict::CertifiedInfeasible &&
        b.verdict == Verdict::Feasible) {
      tr.semidefinite = bisect(a.p, b.p, 1e-5, [&](double p) {
        return test_compatibility(
                   family_cov_from_pmf(num_variables, alphabet_size, p), dag, tol)
                   .verdict == Verdict::Feasible;
      });
    }
    if (entropic && !tr.combined_entropic && a.entropic_reject &&
        !b.entropic_reject) {
      tr.combined_entropic = bisect(a.p, b.p, 1e-10, [&](double p) {
        return entropic_accepts(alphabet_size, p);
      });
    }
    if (entropic && !tr.e1) {
      const bool ra = entropic_rejections(*a.values).e1;
      const bool rb = entropic_rejections(*b.values).e1;
      if (ra && !rb) {
        tr.e1 = bisect(a.p, b.p, 1e-10, [&](double p) {
          return !entropic_rejections(family_entropic_values(alphabet_size, p)).e1;
        });
      }
    }
  }
  return sweep;
}

std::vector<double> parse_grid(const std::string& spec) {
  double a = 0.0, b = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof()) {
    throw std::invalid_argument("grid must look like a:b:step, got '" + spec + "'");
  }
  if (!(step > 0.0) || b < a) {
    throw std::invalid_argument("grid needs step > 0 and a <= b");
  }
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double p = a + static_cast<double>(k) * step;
    if (p > b + 1e-12) break;
    grid.push_back(std::min(p, b));
  }
  return grid;
}

void write_sweep_csv(std::ostream& out, const FamilySweep& sweep) {
  out << "p,verdict,iterations,witness_valid,e1_1,e1_2,e1_3,e2_1,e2_2,e2_3,e3,"
         "e4_1,e4_2,e4_3,e5,e6,entropic_reject\n";
  for (const auto& row : sweep.rows) {
    out << fmt(row.p) << ',' << to_string(row.verdict) << ',' << row.iterations
        << ',' << (row.witness_valid ? 1 : 0);
    if (row.values) {
      for (double v : row.values->all()) out << ',' << fmt(v);
    } else {
      for (int i = 0; i < 12; ++i) out << ',';
    }
    out << ',' << (row.entropic_reject ? 1 : 0) << '\n';
  }
}

ThresholdResult threshold_bisect(
    const BipartiteDag& dag, const std::function<BlockCovariance(double)>& family,
    double precision, const Tolerances& tol) {
  ThresholdResult out;
  const auto feasible = [&](double p) {
    ++out.evaluations;
    const auto verdict = test_compatibility(family(p), dag, tol).verdict;
    if (verdict == Verdict::Undecided) {
      throw std::logic_error("threshold_bisect: Undecided verdict at p = " + fmt(p));
    }
    return verdict == Verdict::Feasible;
  };
  const std::size_t steps = static_cast<std::size_t>(std::lround(1.0 / kCoarseStep));
  std::vector<bool> accepted;
  for (std::size_t k = 0; k <= steps; ++k) {
    accepted.push_back(feasible(static_cast<double>(k) * kCoarseStep));
  }
  if (!accepted.back()) {
    throw std::domain_error("threshold_bisect: p = 1 is not compatible");
  }
  std::size_t first = 0;
  while (!accepted[first]) ++first;
  for (std::size_t k = first; k < accepted.size(); ++k) {
    if (!accepted[k]) {
      throw std::logic_error(
          "threshold_bisect: verdicts are not monotone in p (accept at " +
          fmt(static_cast<double>(first) * kCoarseStep) + ", reject at " +
          fmt(static_cast<double>(k) * kCoarseStep) + ")");
    }
  }
  if (first == 0) return out;
  out.threshold = bisect(static_cast<double>(first - 1) * kCoarseStep,
                         static_cast<double>(first) * kCoarseStep, precision,
                         [&](double p) { return feasible(p); });
  return out;
}

EntropicValues family_entropic_values(std::size_t alphabet_size, double p) {
  return entropic_tests(entropy_profile(family_pmd(3, alphabet_size, p)));
}

double entropic_transition(std::size_t alphabet_size, double precision) {
  const std::size_t steps = static_cast<std::size_t>(std::lround(1.0 / kCoarseStep));
  std::size_t first = steps + 1;
  for (std::size_t k = 0; k <= steps; ++k) {
    const bool ok = entropic_accepts(alphabet_size, static_cast<double>(k) * kCoarseStep);
    if (ok && first > steps) first = k;
    if (!ok && first <= steps) {
      throw std::logic_error("entropic_transition: acceptance is not monotone in p");
    }
  }
  if (first > steps) {
    throw std::domain_error("entropic_transition: p = 1 is rejected");
  }
  if (first == 0) return 0.0;
  return bisect(static_cast<double>(first - 1) * kCoarseStep,
                static_cast<double>(first) * kCoarseStep, precision,
                [&](double p) { return entropic_accepts(alphabet_size, p); });
}

double entropic_grid_transition(std::size_t alphabet_size, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  // Start next to the exact transition and walk to the first accepted point.
  const double exact = entropic_transition(alphabet_size);
  auto k = static_cast<long long>(std::floor(exact / step)) - 1;
  k = std::max(0LL, k);
  while (!entropic_accepts(alphabet_size, static_cast<double>(k) * step)) ++k;
  while (k > 0 && entropic_accepts(alphabet_size, static_cast<double>(k - 1) * step)) --k;
  return static_cast<double>(k) * step;
}

AlphabetScan alphabet_scan(std::size_t d_min, std::size_t d_max,
                           double grid_step, std::size_t jobs) {
  if (d_min < 2 || d_max < d_min) {
    throw std::invalid_argument("alphabet_scan: need 2 <= d_min <= d_max");
  }
  AlphabetScan scan;
  scan.rows.resize(d_max - d_min + 1);
  parallel_for(scan.rows.size(), jobs, [&](std::size_t i) {
    auto& row = scan.rows[i];
    row.alphabet_size = d_min + i;
    row.combined = entropic_transition(row.alphabet_size);
    row.grid = entropic_grid_transition(row.alphabet_size, grid_step);
    row.e1 = e1_root(static_cast<double>(row.alphabet_size));
  });
  const double t = triangle_threshold();
  for (const auto& row : scan.rows) {
    if (!scan.first_exceeding && row.combined > t) {
      scan.first_exceeding = row.alphabet_size;
    }
    if (!scan.first_exceeding_grid && row.grid > t) {
      scan.first_exceeding_grid = row.alphabet_size;
    }
  }
  return scan;
}

}  // namespace lsdp
