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

// Structural analysis of recoverability: conditional blocks, the
// kernel-inclusion test, Choi-map application, and block-operator
// consistency for recovery from a smaller marginal.

#include <string>
#include <vector>

#include "qmarkov/registers.hpp"

namespace qmarkov {

/// Unnormalized operator left after projecting one subsystem onto |j>.
/// The collapsed subsystem stays in place as |j><j|.
struct ConditionalBlock {
  Eigen::Index outcome = 0;
  QubitRegister kept;
  CMatrix matrix;
  double weight = 0.0;  // trace
};

ConditionalBlock conditional_block(
    const DensityOperator& rho, const std::string& measure,
    Eigen::Index outcome, const Labels& trace_out);

struct OutcomeInclusion {
  Eigen::Index outcome = 0;
  double weight = 0.0;
  Eigen::Index ker_dim_ac = 0;
  Eigen::Index ker_dim_bc = 0;
  bool contained = true;
  double max_leak = 0.0;
  /// Kernel vector of the AC block with the largest leak (empty if contained).
  CVector leak_vector;
};

/// Ker(rho_AC|j) ⊆ Ker(rho_BC|j) for every outcome j on C.  A pass is a
/// necessary condition for recoverability only.
struct InclusionReport {
  Labels roles;  // {A, B, C} as found in the input register
  std::vector<OutcomeInclusion> per_outcome;
  bool verdict = true;
  double tol = 0.0;
  double rank_tol = 0.0;
};

inline constexpr double kInclusionTol = 1e-8;

/// Roles are positional: first label is A, second B, third the measured C.
InclusionReport kernel_inclusion_check(
    const DensityOperator& rho_abc, double tol = kInclusionTol,
    double rank_tol = linops::kRankRelTol);

/// Register of id ⊗ R output: `act_on` followed by the extension factors.
QubitRegister choi_output_register(
    const QubitRegister& input, std::string_view act_on,
    const ChoiOperator& choi);

/// (id ⊗ R)(rho) for the map R with Choi matrix `choi` over
/// input ⊗ `channel_output`.  No positivity or trace assumptions.
CMatrix apply_choi(
    const CMatrix& rho, const QubitRegister& reg, std::string_view act_on,
    const CMatrix& choi, const QubitRegister& channel_output);

DensityOperator apply_choi(
    const DensityOperator& rho, const ChoiOperator& choi,
    std::string_view act_on);

/// max |(id ⊗ R)(marginal) - target|, R acting on choi.input_label().
double verify_recovery(
    const DensityOperator& target, const DensityOperator& marginal,
    const ChoiOperator& choi);

struct BlockOperator {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  QubitRegister on;
  CMatrix matrix;
};

/// [Theta]_ij = <i|_X rho |j>_X, row-major over the outcomes of X.
std::vector<BlockOperator> theta_blocks(
    const DensityOperator& rho, std::string_view condition_on);

struct BlockWitness {
  Eigen::Index first_row = 0, first_col = 0;
  Eigen::Index second_row = 0, second_col = 0;
  CMatrix traced;        // the common traced block
  double full_gap = 0.0;  // max-abs difference of the full blocks
};

struct ConsistencyReport {
  /// False iff two blocks share a traced part but differ in full.
  bool consistent = true;
  std::vector<BlockWitness> witnesses;
  /// Every linear relation among traced blocks also holds among full
  /// blocks, i.e. some linear map keep -> keep ⊗ extend_to reproduces them.
  bool linear_extension_exists = true;
  std::vector<BlockOperator> blocks;
  std::vector<BlockOperator> traced_blocks;
  double tol = 0.0;
};

ConsistencyReport marginal_block_consistency(
    const DensityOperator& rho_full, const std::string& keep,
    const Labels& extend_to, double tol = 1e-10);

}  // namespace qmarkov
