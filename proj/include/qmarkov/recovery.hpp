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

// Recovery problems built on the conic engine: CPTP recovery feasibility,
// quasiprobability sampling overhead, and parameter sweeps.

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmarkov/conic.hpp"
#include "qmarkov/markov.hpp"

namespace qmarkov {
namespace conic {

class MarginalMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How a marginal embeds into a target: the last marginal factor is the
/// channel input, the trailing target factors are the extension.
struct RecoveryLayout {
  std::string act_on;
  std::string copy_label;
  Labels extension;
  QubitRegister choi_reg;        // input ⊗ copy ⊗ extension
  QubitRegister channel_output;  // copy ⊗ extension
};

inline constexpr double kMarginalTol = 1e-10;

RecoveryLayout recovery_layout(
    const DensityOperator& marginal, const DensityOperator& target);

/// J ⪰ 0, Tr_out J = I, (id ⊗ R_J)(marginal) = target.  Zero objective.
ConicProblem build_cptp_feasibility(
    const DensityOperator& marginal, const DensityOperator& target);

/// min c1 + c2 over J1, J2 ⪰ 0 with Tr_out J_i = c_i I and
/// (id ⊗ R_{J1 - J2})(marginal) = target.
ConicProblem build_overhead_problem(
    const DensityOperator& marginal, const DensityOperator& target);

struct CertificationReport {
  Status status = Status::kMaxIter;
  double phase1_residual = 0.0;
  /// Recovered channel when feasible.
  std::optional<ChoiOperator> choi;
  /// verify_recovery of the recovered channel, NaN when infeasible.
  double reconstruction_residual = std::numeric_limits<double>::quiet_NaN();
  ConicSolution solution;
};

CertificationReport certify_cptp(
    const DensityOperator& marginal, const DensityOperator& target,
    const SolverConfig& config = {});

struct OverheadResult {
  Status status = Status::kMaxIter;
  /// log2(c1 + c2); +infinity when no Hermitian-preserving recovery exists,
  /// NaN when undetermined.
  double nu = std::numeric_limits<double>::quiet_NaN();
  double c1 = 0.0;
  double c2 = 0.0;
  std::optional<ChoiOperator> choi_difference;
  double certificate_residual = std::numeric_limits<double>::quiet_NaN();
  ConicSolution solution;

  bool finite() const { return std::isfinite(nu); }
  double cost() const { return c1 + c2; }
};

OverheadResult sampling_overhead(
    const DensityOperator& marginal, const DensityOperator& target,
    const SolverConfig& config = {});

struct SweepRow {
  double p = 0.0;
  std::optional<bool> inclusion_verdict;
  std::optional<Status> cptp_status;
  std::optional<Status> hptp_status;
  double nu = std::numeric_limits<double>::quiet_NaN();
  double cost = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Smallest grid point whose marginal passes the inclusion test.
  std::optional<double> smallest_inclusion_p;
};

using StateFamily = std::function<DensityOperator(double)>;

/// Per grid point: inclusion test on the marginal (last factor traced out),
/// CPTP feasibility and HPTP overhead.  Failures are recorded per row.
SweepResult recoverability_sweep(
    const StateFamily& family, std::span<const double> grid,
    const SolverConfig& config = {});

}  // namespace conic
}  // namespace qmarkov
