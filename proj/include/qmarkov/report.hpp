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
#pragma once

// JSON encodings of states, reports and solver output.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "qmarkov/conic.hpp"
#include "qmarkov/markov.hpp"
#include "qmarkov/recovery.hpp"
#include "qmarkov/registers.hpp"

namespace qmarkov {
namespace report {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string version();

/// A real, or the string "inf" / "-inf" / "nan".
Json number(double x);
/// Inverse of number().
double parse_number(const Json& j);

/// {"re": [[...]], "im": [[...]]}
Json matrix(const CMatrix& m);
CMatrix parse_matrix(const Json& re, const Json& im);
Json vector(const CVector& v);
/// "|01>" for index 1 over two qubits.
std::string basis_label(const QubitRegister& reg, Eigen::Index index);

/// {"labels", "dims", "re", "im", "normalized"}.
Json state(const DensityOperator& rho);
DensityOperator parse_state(const Json& j);
DensityOperator read_state(const std::filesystem::path& path);
void write_state(const std::filesystem::path& path, const DensityOperator& rho);

Json inclusion(const InclusionReport& r);
Json consistency(const ConsistencyReport& r, bool verbose = false);
Json choi(const ChoiOperator& c);

Json config(const conic::SolverConfig& c);
/// Variable dimensions and constraint count.
Json problem(const conic::ConicProblem& p);
/// Status, residuals and iteration counts; the full debug dump with
/// variable values and the residual history when verbose.
Json solution(const conic::ConicSolution& s, bool verbose = false);
Json certification(const conic::CertificationReport& r, bool verbose = false);
Json overhead(const conic::OverheadResult& r, bool verbose = false);
Json sweep(const conic::SweepResult& r);

struct RunReport {
  std::string command;
  Json inputs = Json::object();
  Json results = Json::object();
  conic::SolverConfig config;
  std::string timestamp;  // omitted when empty
};

Json to_json(const RunReport& r);

/// Doubles are printed in shortest round-trip form.
std::string dump(const Json& j, bool indent = true);

}  // namespace report
}  // namespace qmarkov
