#include "lsdp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lsdp {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw InputError(field + ": " + what);
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::size_t as_count(const Json& j, const std::string& field, std::size_t min) {
  if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min)) {
    fail(field, "expected an integer >= " + std::to_string(min));
  }
  return j.get<std::size_t>();
}

double as_number(const Json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "expected a finite number");
  return v;
}

std::vector<std::size_t> count_list(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_count(j[i], field + "[" + std::to_string(i) + "]", 1));
  }
  return out;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = as_number(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json tolerances_to_json(const Tolerances& t) {
  return {{"feasibility", t.feasibility},
          {"psd", t.psd},
          {"gap", t.gap},
          {"max_iterations", t.max_iterations},
          {"certificate_every", t.certificate_every}};
}

Json realization_to_json(const FiniteRealization& r) {
  Json outcomes = Json::array();
  for (Index j = 0; j < r.vectors.cols(); ++j) {
    outcomes.push_back(vector_to_json(r.vectors.col(j)));
  }
  return {{"outcomes", outcomes}, {"probabilities", r.probabilities}};
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(origin + ":" + std::to_string(line) + ":" +
                     std::to_string(col) + ": invalid JSON");
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

BipartiteDag dag_from_json(const Json& j) {
  const std::size_t m = as_count(require(j, "observables", "dag"), "dag.observables", 1);
  const Json& edges = require(j, "hyperedges", "dag");
  if (!edges.is_array()) fail("dag.hyperedges", "expected an array of arrays");
  std::vector<std::vector<std::size_t>> hyper;
  for (std::size_t n = 0; n < edges.size(); ++n) {
    const std::string field = "dag.hyperedges[" + std::to_string(n) + "]";
    if (!edges[n].is_array() || edges[n].empty()) {
      fail(field, "expected a non-empty array of observable indices");
    }
    std::vector<std::size_t> e;
    for (std::size_t i = 0; i < edges[n].size(); ++i) {
      const std::string f = field + "[" + std::to_string(i) + "]";
      const Json& v = edges[n][i];
      if (!v.is_number_integer() || v.get<long long>() < 1 ||
          v.get<long long>() > static_cast<long long>(m)) {
        fail(f, "index " + v.dump() + " out of range 1.." + std::to_string(m));
      }
      e.push_back(v.get<std::size_t>() - 1);
    }
    hyper.push_back(std::move(e));
  }
  return BipartiteDag(m, std::move(hyper));
}

Json dag_to_json(const BipartiteDag& dag) {
  Json edges = Json::array();
  for (const auto& e : dag.hyperedges()) {
    Json a = Json::array();
    for (std::size_t m : e) a.push_back(m + 1);
    edges.push_back(a);
  }
  return {{"observables", dag.num_observables()}, {"hyperedges", edges}};
}

DiscreteDistribution pmf_from_json(const Json& j) {
  const auto sizes = count_list(require(j, "alphabets", "pmf"), "pmf.alphabets");
  const Json& table = require(j, "pmf", "pmf");
  if (!table.is_array()) fail("pmf.pmf", "expected an array of probabilities");
  std::vector<double> pmf;
  pmf.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    pmf.push_back(as_number(table[i], "pmf.pmf[" + std::to_string(i) + "]"));
  }
  try {
    return DiscreteDistribution(sizes, std::move(pmf));
  } catch (const std::exception& e) {
    fail("pmf", e.what());
  }
}

Json pmf_to_json(const DiscreteDistribution& dist) {
  return {{"alphabets", dist.alphabet_sizes()}, {"pmf", dist.pmf()}};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string f = field + "[" + std::to_string(r) + "]";
    const Vector row = vector_from_json(j[r], f);
    if (r == 0) {
      cols = static_cast<std::size_t>(row.size());
      m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    } else if (static_cast<std::size_t>(row.size()) != cols) {
      fail(f, "row has " + std::to_string(row.size()) + " entries, expected " +
                  std::to_string(cols));
    }
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

BlockCovariance covariance_from_json(const Json& j) {
  BlockCovariance cov{BlockPartition(count_list(require(j, "dims", "covariance"),
                                                "covariance.dims")),
                      matrix_from_json(require(j, "matrix", "covariance"),
                                       "covariance.matrix")};
  try {
    validate_covariance(cov);
  } catch (const std::invalid_argument& e) {
    fail("covariance", e.what());
  }
  return cov;
}

Json covariance_to_json(const BlockCovariance& cov) {
  return {{"dims", cov.partition.dims()}, {"matrix", matrix_to_json(cov.matrix)}};
}

FeatureMap feature_map_from_json(const Json& j) {
  const Json& list = require(j, "features", "features");
  if (!list.is_array() || list.empty()) fail("features", "expected a non-empty array");
  std::vector<Matrix> maps;
  for (std::size_t m = 0; m < list.size(); ++m) {
    const std::string field = "features[" + std::to_string(m) + "]";
    // Rows of the JSON are outcome vectors, i.e. columns of the map.
    Matrix outcomes = matrix_from_json(list[m], field);
    if (outcomes.size() == 0) fail(field, "expected at least one outcome vector");
    maps.push_back(outcomes.transpose());
  }
  return FeatureMap(std::move(maps));
}

Json feature_map_to_json(const FeatureMap& f) {
  Json list = Json::array();
  for (std::size_t m = 0; m < f.num_observables(); ++m) {
    list.push_back(matrix_to_json(f.vectors(m).transpose()));
  }
  return {{"features", list}};
}

Json report_to_json(const TestReport& report, const BipartiteDag& dag,
                    const BlockPartition& partition, const ReportOptions& options) {
  Json j = {{"schema", kReportSchema},
            {"verdict", to_string(report.verdict)},
            {"residual", report.residual},
            {"iterations", report.iterations},
            {"solver", to_string(report.solver)},
            {"tolerances", tolerances_to_json(report.tolerances)},
            {"dag", dag_to_json(dag)},
            {"dims", partition.dims()}};
  if (report.decomposition && options.include_decomposition) {
    Json comps = Json::array();
    for (const auto& c : report.decomposition->components) comps.push_back(matrix_to_json(c));
    j["decomposition"] = {{"remainder", matrix_to_json(report.decomposition->remainder)},
                          {"components", comps}};
  }
  if (report.witness) {
    j["witness"] = {{"gap", report.witness->gap},
                    {"dual_min_eig", report.witness->dual_min_eig}};
    if (options.include_witness_matrix) {
      j["witness"]["x"] = matrix_to_json(report.witness->x);
    }
  }
  return j;
}

ParsedReport report_from_json(const Json& j) {
  const Json& schema = require(j, "schema", "report");
  if (!schema.is_string() || schema.get<std::string>() != kReportSchema) {
    fail("report.schema", std::string("expected \"") + kReportSchema + "\"");
  }
  ParsedReport out;
  const Json& verdict = require(j, "verdict", "report");
  if (!verdict.is_string()) fail("report.verdict", "expected a string");
  try {
    out.report.verdict = parse_verdict(verdict.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail("report.verdict", e.what());
  }
  out.report.residual = as_number(require(j, "residual", "report"), "report.residual");
  out.report.iterations =
      as_count(require(j, "iterations", "report"), "report.iterations", 0);
  if (const auto it = j.find("solver"); it != j.end() && it->is_string()) {
    try {
      out.report.solver = parse_solver(it->get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail("report.solver", e.what());
    }
  }
  if (const auto it = j.find("tolerances"); it != j.end() && it->is_object()) {
    auto& t = out.report.tolerances;
    if (it->contains("feasibility")) t.feasibility = as_number((*it)["feasibility"], "report.tolerances.feasibility");
    if (it->contains("psd")) t.psd = as_number((*it)["psd"], "report.tolerances.psd");
    if (it->contains("gap")) t.gap = as_number((*it)["gap"], "report.tolerances.gap");
    if (it->contains("max_iterations")) t.max_iterations = as_count((*it)["max_iterations"], "report.tolerances.max_iterations", 0);
  }
  try {
    out.dag = dag_from_json(require(j, "dag", "report"));
  } catch (const std::invalid_argument& e) {
    fail("report.dag", e.what());
  }
  out.partition = BlockPartition(count_list(require(j, "dims", "report"), "report.dims"));
  if (out.partition.num_blocks() != out.dag.num_observables()) {
    fail("report.dims", "length does not match dag.observables");
  }
  const auto k = static_cast<Index>(out.partition.total());
  if (const auto it = j.find("decomposition"); it != j.end()) {
    Decomposition d;
    d.remainder = matrix_from_json(require(*it, "remainder", "report.decomposition"),
                                   "report.decomposition.remainder");
    const Json& comps = require(*it, "components", "report.decomposition");
    if (!comps.is_array()) fail("report.decomposition.components", "expected an array");
    for (std::size_t n = 0; n < comps.size(); ++n) {
      d.components.push_back(matrix_from_json(
          comps[n], "report.decomposition.components[" + std::to_string(n) + "]"));
    }
    if (d.remainder.rows() != k || d.remainder.cols() != k) {
      fail("report.decomposition.remainder", "wrong shape for dims");
    }
    if (d.components.size() != out.dag.num_latents()) {
      fail("report.decomposition.components", "need one matrix per latent");
    }
    for (std::size_t n = 0; n < d.components.size(); ++n) {
      if (d.components[n].rows() != k || d.components[n].cols() != k) {
        fail("report.decomposition.components[" + std::to_string(n) + "]",
             "wrong shape for dims");
      }
    }
    out.report.decomposition = std::move(d);
  }
  if (const auto it = j.find("witness"); it != j.end()) {
    Witness w;
    w.gap = as_number(require(*it, "gap", "report.witness"), "report.witness.gap");
    w.dual_min_eig = as_number(require(*it, "dual_min_eig", "report.witness"),
                               "report.witness.dual_min_eig");
    if (it->contains("x")) w.x = matrix_from_json((*it)["x"], "report.witness.x");
    out.report.witness = std::move(w);
  }
  return out;
}

Json model_to_json(const VectorLatentModel& model) {
  Json latents = Json::array();
  for (std::size_t n = 0; n < model.latents.size(); ++n) {
    Json l = realization_to_json(model.latents[n]);
    Json children = Json::array();
    for (std::size_t m : model.dag.children(n)) children.push_back(m + 1);
    l["children"] = children;
    latents.push_back(l);
  }
  Json noise = Json::array();
  for (std::size_t m = 0; m < model.noise.size(); ++m) {
    if (!model.noise[m]) continue;
    Json l = realization_to_json(*model.noise[m]);
    l["observable"] = m + 1;
    noise.push_back(l);
  }
  return {{"schema", kModelSchema},
          {"dag", dag_to_json(model.dag)},
          {"dims", model.partition.dims()},
          {"latents", latents},
          {"noise", noise}};
}

}  // namespace lsdp
