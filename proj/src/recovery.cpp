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

#include "qmarkov/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace qmarkov {
namespace conic {

RecoveryLayout recovery_layout(
    const DensityOperator& marginal, const DensityOperator& target) {
  const auto& ml = marginal.labels();
  const auto& tl = target.labels();
  if (ml.empty() || tl.size() <= ml.size() ||
      !std::equal(ml.begin(), ml.end(), tl.begin())) {
    throw MarginalMismatch(
        "target subsystems must extend the marginal's subsystems");
  }
  RecoveryLayout out;
  out.act_on = ml.back();
  out.copy_label = out.act_on + "'";
  out.extension.assign(tl.begin() + Eigen::Index(ml.size()), tl.end());

  const CMatrix reduced = partial_trace(target.matrix(), target.reg(), out.extension);
  if (!(target.reg().without(out.extension) == marginal.reg())) {
    throw MarginalMismatch("marginal dimensions do not match the target");
  }
  const double gap = (reduced - marginal.matrix()).cwiseAbs().maxCoeff();
  if (gap > kMarginalTol) {
    throw MarginalMismatch(
        "marginal is not the partial trace of the target over the extension "
        "(max deviation " + std::to_string(gap) + ")");
  }

  const int d_in = marginal.reg().dim_of(out.act_on);
  Labels labels{out.act_on, out.copy_label};
  std::vector<int> dims{d_in, d_in};
  for (const auto& e : out.extension) {
    labels.push_back(e);
    dims.push_back(target.reg().dim_of(e));
  }
  out.choi_reg = QubitRegister(labels, dims);
  out.channel_output = out.choi_reg.without({out.act_on});
  return out;
}

namespace {

// J -> (id ⊗ R_J)(marginal); the output factor order is the target's.
HermitianMap reconstruction_map(
    const DensityOperator& marginal, const RecoveryLayout& layout) {
  return [&marginal, layout](const CMatrix& j) {
    return apply_choi(
        marginal.matrix(), marginal.reg(), layout.act_on, j, layout.channel_output);
  };
}

HermitianMap output_trace_map(const RecoveryLayout& layout) {
  Labels out = layout.channel_output.labels();
  return [layout, out](const CMatrix& j) {
    return partial_trace(j, layout.choi_reg, out);
  };
}

CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }

}  // namespace

ConicProblem build_cptp_feasibility(
    const DensityOperator& marginal, const DensityOperator& target) {
  const auto layout = recovery_layout(marginal, target);
  const Eigen::Index d_in = layout.choi_reg.dims()[0];

  ConicProblem p;
  const auto j = p.add_psd_block("J", layout.choi_reg.dim());
  p.add_map_equality(output_trace_map(layout), {{j, 1.0}}, {}, identity(d_in));
  p.add_map_equality(
      reconstruction_map(marginal, layout), {{j, 1.0}}, {},
      target.matrix());
  return p;
}

ConicProblem build_overhead_problem(
    const DensityOperator& marginal, const DensityOperator& target) {
  const auto layout = recovery_layout(marginal, target);
  const Eigen::Index d_in = layout.choi_reg.dims()[0];
  const Eigen::Index n = layout.choi_reg.dim();

  ConicProblem p;
  const auto j1 = p.add_psd_block("J1", n);
  const auto j2 = p.add_psd_block("J2", n);
  const auto c1 = p.add_free_scalar("c1");
  const auto c2 = p.add_free_scalar("c2");
  const CMatrix zero = CMatrix::Zero(d_in, d_in);
  p.add_map_equality(output_trace_map(layout), {{j1, 1.0}}, {{c1, -identity(d_in)}}, zero);
  p.add_map_equality(output_trace_map(layout), {{j2, 1.0}}, {{c2, -identity(d_in)}}, zero);
  p.add_map_equality(
      reconstruction_map(marginal, layout), {{j1, 1.0}, {j2, -1.0}}, {},
      target.matrix());
  p.set_objective({{}, {{c1, 1.0}, {c2, 1.0}}});
  return p;
}

CertificationReport certify_cptp(
    const DensityOperator& marginal, const DensityOperator& target,
    const SolverConfig& config) {
  const auto layout = recovery_layout(marginal, target);
  CertificationReport out;
  out.solution = solve(build_cptp_feasibility(marginal, target), config);
  out.status = out.solution.status;
  out.phase1_residual = out.solution.phase1_residual;
  if (out.solution.feasible()) {
    // The solver point satisfies the constraints to eps_feas only.
    ChoiOperator::Tolerances tol{10 * config.eps_feas + 1e-9, 10 * config.eps_psd};
    out.choi.emplace(
        layout.act_on, layout.copy_label, layout.extension,
        out.solution.block_values[0], true, layout.choi_reg.dims(), tol);
    out.reconstruction_residual = verify_recovery(target, marginal, *out.choi);
  }
  return out;
}

OverheadResult sampling_overhead(
    const DensityOperator& marginal, const DensityOperator& target,
    const SolverConfig& config) {
  const auto layout = recovery_layout(marginal, target);
  OverheadResult out;
  out.solution = solve(build_overhead_problem(marginal, target), config);
  out.status = out.solution.status;
  if (out.status == Status::kInfeasible) {
    out.nu = std::numeric_limits<double>::infinity();
    return out;
  }
  if (!out.solution.feasible()) return out;

  out.c1 = out.solution.scalar_values[0];
  out.c2 = out.solution.scalar_values[1];
  out.nu = std::log2(out.c1 + out.c2);
  const CMatrix diff = out.solution.block_values[0] - out.solution.block_values[1];
  ChoiOperator::Tolerances tol{20 * config.eps_feas + 1e-9, 0.0};
  out.choi_difference.emplace(
      layout.act_on, layout.copy_label, layout.extension, diff, false,
      layout.choi_reg.dims(), tol);
  out.certificate_residual = verify_recovery(target, marginal, *out.choi_difference);
  return out;
}

SweepResult recoverability_sweep(
    const StateFamily& family, std::span<const double> grid,
    const SolverConfig& config) {
  SweepResult out;
  for (double p : grid) {
    SweepRow row;
    row.p = p;
    try {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("grid point outside [0, 1]");
      }
      const auto target = family(p);
      const auto marginal = partial_trace(target, {target.labels().back()});
      row.inclusion_verdict = kernel_inclusion_check(marginal).verdict;
      row.cptp_status = certify_cptp(marginal, target, config).status;
      const auto overhead = sampling_overhead(marginal, target, config);
      row.hptp_status = overhead.status;
      row.nu = overhead.nu;
      row.cost = overhead.finite() ? overhead.cost() : overhead.nu;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    if (row.inclusion_verdict.value_or(false) &&
        (!out.smallest_inclusion_p || p < *out.smallest_inclusion_p)) {
      out.smallest_inclusion_p = p;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace conic
}  // namespace qmarkov
