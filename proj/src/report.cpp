// Copyright 2026 The qmarkov Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qmarkov/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qmarkov {
namespace report {

namespace {

Json status_or_null(const std::optional<conic::Status>& s) {
  return s ? Json(conic::to_string(*s)) : Json(nullptr);
}

Json real_rows(const CMatrix& m, bool imag) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json labels_json(const QubitRegister& reg) {
  return {{"labels", reg.labels()}, {"dims", reg.dims()}};
}

}  // namespace

std::string version() {
#ifdef QMARKOV_VERSION
  return QMARKOV_VERSION;
#else
  return "unknown";
#endif
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double parse_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw FormatError("expected a number, got " + j.dump());
}

Json matrix(const CMatrix& m) {
  return {{"re", real_rows(m, false)}, {"im", real_rows(m, true)}};
}

CMatrix parse_matrix(const Json& re, const Json& im) {
  if (!re.is_array() || !im.is_array() || re.size() != im.size()) {
    throw FormatError("\"re\" and \"im\" must be arrays of equal size");
  }
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = rows ? static_cast<Eigen::Index>(re[0].size()) : 0;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = re[i];
    const auto& c = im[i];
    if (!r.is_array() || !c.is_array() ||
        static_cast<Eigen::Index>(r.size()) != cols ||
        static_cast<Eigen::Index>(c.size()) != cols) {
      throw FormatError("ragged matrix row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = Complex(parse_number(r[j]), parse_number(c[j]));
    }
  }
  return m;
}

Json vector(const CVector& v) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

std::string basis_label(const QubitRegister& reg, Eigen::Index index) {
  std::string digits;
  Eigen::Index rest = index;
  for (std::size_t k = reg.size(); k-- > 0;) {
    const int d = reg.dims()[k];
    digits.insert(digits.begin(), static_cast<char>('0' + rest % d));
    rest /= d;
  }
  return "|" + digits + ">";
}

Json state(const DensityOperator& rho) {
  Json j = labels_json(rho.reg());
  j["re"] = real_rows(rho.matrix(), false);
  j["im"] = real_rows(rho.matrix(), true);
  j["normalized"] = rho.normalized();
  return j;
}

DensityOperator parse_state(const Json& j) {
  if (!j.is_object()) throw FormatError("state must be a JSON object");
  for (const char* key : {"labels", "re", "im"}) {
    if (!j.contains(key)) {
      throw FormatError(std::string("state is missing \"") + key + "\"");
    }
  }
  Labels labels;
  std::vector<int> dims;
  try {
    labels = j.at("labels").get<Labels>();
    dims = j.contains("dims") ? j.at("dims").get<std::vector<int>>()
                              : std::vector<int>(labels.size(), 2);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad labels or dims: ") + e.what());
  }
  const bool normalized = j.value("normalized", true);
  return DensityOperator(
      QubitRegister(std::move(labels), std::move(dims)),
      parse_matrix(j.at("re"), j.at("im")), normalized);
}

DensityOperator read_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return parse_state(j);
}

void write_state(const std::filesystem::path& path, const DensityOperator& rho) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << dump(state(rho)) << '\n';
  if (!out) throw FormatError("write failed for " + path.string());
}

Json inclusion(const InclusionReport& r) {
  Json outcomes = Json::array();
  const QubitRegister ac =
      r.roles.size() == 3 ? QubitRegister({r.roles[0], r.roles[2]}) : QubitRegister();
  for (const auto& o : r.per_outcome) {
    Json e = {
        {"j", o.outcome},
        {"weight", o.weight},
        {"ker_dim_ac", o.ker_dim_ac},
        {"ker_dim_bc", o.ker_dim_bc},
        {"contained", o.contained},
        {"max_leak", o.max_leak},
    };
    if (o.leak_vector.size()) {
      Eigen::Index k = 0;
      o.leak_vector.cwiseAbs().maxCoeff(&k);
      e["leak_basis_vector"] = basis_label(ac, k);
      e["leak_vector"] = vector(o.leak_vector);
    }
    outcomes.push_back(std::move(e));
  }
  Json j = {
      {"verdict", r.verdict},
      {"tol", r.tol},
      {"rank_tol", r.rank_tol},
      {"roles", r.roles},
      {"semantics", "necessary condition only; a pass does not certify recoverability"},
      {"outcomes", outcomes},
  };
  return j;
}

Json consistency(const ConsistencyReport& r, bool verbose) {
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) {
    witnesses.push_back({
        {"first", {w.first_row, w.first_col}},
        {"second", {w.second_row, w.second_col}},
        {"traced", matrix(w.traced)},
        {"full_gap", w.full_gap},
    });
  }
  Json j = {
      {"consistent", r.consistent},
      {"linear_extension_exists", r.linear_extension_exists},
      {"tol", r.tol},
      {"witnesses", witnesses},
  };
  if (verbose) {
    Json blocks = Json::array();
    for (std::size_t k = 0; k < r.blocks.size(); ++k) {
      Json b = {{"row", r.blocks[k].row}, {"col", r.blocks[k].col}};
      b["on"] = labels_json(r.blocks[k].on);
      b["matrix"] = matrix(r.blocks[k].matrix);
      if (k < r.traced_blocks.size()) {
        b["traced_on"] = labels_json(r.traced_blocks[k].on);
        b["traced"] = matrix(r.traced_blocks[k].matrix);
      }
      blocks.push_back(std::move(b));
    }
    j["blocks"] = blocks;
  }
  return j;
}

Json choi(const ChoiOperator& c) {
  Json j = {
      {"input", c.input_label()},
      {"copy", c.copy_label()},
      {"extension", c.extension_labels()},
      {"cp", c.cp_flag()},
      {"scale", c.scale()},
  };
  j["register"] = labels_json(c.reg());
  j["matrix"] = matrix(c.matrix());
  return j;
}

Json config(const conic::SolverConfig& c) {
  return {
      {"eps_feas", c.eps_feas},
      {"eps_psd", c.eps_psd},
      {"eps_infeasible", c.eps_infeasible},
      {"max_iterations", c.max_iterations},
      {"rho", c.rho},
      {"relaxation", c.relaxation},
      {"eps_converge", c.eps_converge},
  };
}

Json problem(const conic::ConicProblem& p) {
  Json blocks = Json::array();
  for (const auto& b : p.blocks()) blocks.push_back({{"name", b.name}, {"dim", b.dim}});
  return {
      {"psd_blocks", blocks},
      {"scalars", p.scalars()},
      {"num_variables", p.num_variables()},
      {"num_constraints", p.equalities().size()},
  };
}

Json solution(const conic::ConicSolution& s, bool verbose) {
  Json j = {
      {"status", conic::to_string(s.status)},
      {"objective", number(s.objective_value)},
      {"primal_residual", number(s.primal_residual)},
      {"min_eigenvalue", number(s.min_eigenvalue)},
      {"phase1_residual", number(s.phase1_residual)},
      {"iterations", s.iterations},
  };
  if (verbose) {
    Json blocks = Json::array();
    for (const auto& b : s.block_values) blocks.push_back(matrix(b));
    j["block_values"] = blocks;
    j["scalar_values"] = s.scalar_values;
    Json history = Json::array();
    for (const auto& [it, res] : s.residual_history) history.push_back({it, number(res)});
    j["residual_history"] = history;
  }
  return j;
}

Json certification(const conic::CertificationReport& r, bool verbose) {
  Json j = {
      {"mode", "cptp"},
      {"status", conic::to_string(r.status)},
      {"phase1_residual", number(r.phase1_residual)},
      {"reconstruction_residual", number(r.reconstruction_residual)},
      {"solver", solution(r.solution, verbose)},
  };
  if (r.choi) j["choi"] = choi(*r.choi);
  return j;
}

Json overhead(const conic::OverheadResult& r, bool verbose) {
  Json j = {
      {"mode", "hptp"},
      {"status", conic::to_string(r.status)},
      {"nu", number(r.nu)},
      {"log_base", 2},
  };
  if (r.finite()) {
    j["c1"] = r.c1;
    j["c2"] = r.c2;
    j["c1_plus_c2"] = r.cost();
  } else {
    j["c1_plus_c2"] = number(r.nu);
  }
  j["certificate_residual"] = number(r.certificate_residual);
  j["solver"] = solution(r.solution, verbose);
  if (verbose && r.choi_difference) j["choi_difference"] = choi(*r.choi_difference);
  return j;
}

Json sweep(const conic::SweepResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json e = {
        {"p", row.p},
        {"inclusion", row.inclusion_verdict ? Json(*row.inclusion_verdict) : Json(nullptr)},
        {"cptp", status_or_null(row.cptp_status)},
        {"hptp", status_or_null(row.hptp_status)},
        {"nu", number(row.nu)},
        {"c1_plus_c2", number(row.cost)},
    };
    if (!row.error.empty()) e["error"] = row.error;
    rows.push_back(std::move(e));
  }
  return {
      {"rows", rows},
      {"smallest_inclusion_p",
       r.smallest_inclusion_p ? Json(*r.smallest_inclusion_p) : Json(nullptr)},
  };
}

Json to_json(const RunReport& r) {
  Json j = {
      {"command", r.command},
      {"inputs", r.inputs},
      {"results", r.results},
      {"config", config(r.config)},
      {"version", version()},
  };
  if (!r.timestamp.empty()) j["timestamp"] = r.timestamp;
  return j;
}

std::string dump(const Json& j, bool indent) {
  return j.dump(indent ? 2 : -1);
}

}  // namespace report
}  // namespace qmarkov
