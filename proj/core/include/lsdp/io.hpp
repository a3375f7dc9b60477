#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "lsdp/causal_graph.hpp"
#include "lsdp/distributions.hpp"
#include "lsdp/feature_covariance.hpp"
#include "lsdp/realization.hpp"
#include "lsdp/sdp.hpp"

namespace lsdp {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "lsdp.report/1";
inline constexpr const char* kModelSchema = "lsdp.model/1";

/// Malformed input. The message names the offending field or line.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON file; syntax errors report line and column.
Json load_json_file(const std::string& path);
Json parse_json_text(const std::string& text, const std::string& origin = "input");

/// {"observables": M, "hyperedges": [[1,2],...]} with 1-based indices.
BipartiteDag dag_from_json(const Json& j);
Json dag_to_json(const BipartiteDag& dag);

/// {"alphabets": [D1..DM], "pmf": [...]} row-major, last index fastest.
DiscreteDistribution pmf_from_json(const Json& j);
Json pmf_to_json(const DiscreteDistribution& dist);

/// {"dims": [d1..dM], "matrix": [[...], ...]} dense row-major.
BlockCovariance covariance_from_json(const Json& j);
Json covariance_to_json(const BlockCovariance& cov);

/// {"features": [[y_1, ..., y_D], ...]}: for each observable the list of
/// outcome vectors.
FeatureMap feature_map_from_json(const Json& j);
Json feature_map_to_json(const FeatureMap& f);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& field);

struct ReportOptions {
  bool include_decomposition = true;
  bool include_witness_matrix = false;
};

/// Report with schema, verdict, residual, iterations, tolerances, solver,
/// the dag and dims, and the decomposition / witness.
Json report_to_json(const TestReport& report, const BipartiteDag& dag,
                    const BlockPartition& partition,
                    const ReportOptions& options = {});

struct ParsedReport {
  TestReport report;
  BipartiteDag dag;
  BlockPartition partition;
};

ParsedReport report_from_json(const Json& j);

Json model_to_json(const VectorLatentModel& model);

}  // namespace lsdp
