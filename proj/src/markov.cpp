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

#include "qmarkov/markov.hpp"

#include <algorithm>
#include <cmath>

namespace qmarkov {

namespace {

double max_abs(const CMatrix& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

// Output register with `act_on` followed in place by the extension factors.
QubitRegister output_register(
    const QubitRegister& input, std::string_view act_on,
    const QubitRegister& channel_output) {
  const auto k = input.position(act_on);
  Labels labels;
  std::vector<int> dims;
  for (std::size_t i = 0; i < input.size(); ++i) {
    labels.push_back(input.labels()[i]);
    if (i == k) {
      // The copy factor is the same physical system as act_on.
      dims.push_back(channel_output.dims()[0]);
      for (std::size_t e = 1; e < channel_output.size(); ++e) {
        labels.push_back(channel_output.labels()[e]);
        dims.push_back(channel_output.dims()[e]);
      }
    } else {
      dims.push_back(input.dims()[i]);
    }
  }
  return QubitRegister(std::move(labels), std::move(dims));
}

}  // namespace

ConditionalBlock conditional_block(
    const DensityOperator& rho, const std::string& measure,
    Eigen::Index outcome, const Labels& trace_out) {
  if (std::find(trace_out.begin(), trace_out.end(), measure) != trace_out.end()) {
    throw RegisterError("measured subsystem cannot also be traced out");
  }
  const CMatrix p = basis_projector(rho.reg(), measure, outcome);
  const CMatrix projected = p * rho.matrix() * p;
  ConditionalBlock out;
  out.outcome = outcome;
  out.kept = rho.reg().without(trace_out);
  out.matrix = partial_trace(projected, rho.reg(), trace_out);
  out.weight = out.matrix.trace().real();
  return out;
}

InclusionReport kernel_inclusion_check(
    const DensityOperator& rho_abc, double tol, double rank_tol) {
  if (rho_abc.reg().size() != 3) {
    throw RegisterError(
        "kernel inclusion needs a three-party state, got " +
        std::to_string(rho_abc.reg().size()) + " subsystems");
  }
  const auto& l = rho_abc.labels();
  InclusionReport report;
  report.roles = l;
  report.tol = tol;
  report.rank_tol = rank_tol;
  const int outcomes = rho_abc.reg().dims()[2];
  for (Eigen::Index j = 0; j < outcomes; ++j) {
    const auto ac = conditional_block(rho_abc, l[2], j, {l[1]});
    const auto bc = conditional_block(rho_abc, l[2], j, {l[0]});
    if (ac.matrix.rows() != bc.matrix.rows()) {
      throw linops::DimensionMismatch(
          "A and B must have equal dimension for the inclusion test");
    }
    const auto ker_ac = linops::kernel_basis(ac.matrix, rank_tol);
    const auto ker_bc = linops::kernel_basis(bc.matrix, rank_tol);
    const auto c = linops::subspace_contained(ker_ac, ker_bc, tol);

    OutcomeInclusion o;
    o.outcome = j;
    o.weight = ac.weight;
    o.ker_dim_ac = ker_ac.size();
    o.ker_dim_bc = ker_bc.size();
    o.contained = c.contained;
    o.max_leak = c.max_leak;
    if (!c.contained) o.leak_vector = c.worst_vector;
    report.verdict = report.verdict && o.contained;
    report.per_outcome.push_back(std::move(o));
  }
  return report;
}

QubitRegister choi_output_register(
    const QubitRegister& input, std::string_view act_on,
    const ChoiOperator& choi) {
  return output_register(input, act_on, choi.output_factors());
}

CMatrix apply_choi(
    const CMatrix& rho, const QubitRegister& reg, std::string_view act_on,
    const CMatrix& choi, const QubitRegister& channel_output) {
  const Eigen::Index d_in = reg.dim_of(act_on);
  const Eigen::Index d_out = channel_output.dim();
  if (channel_output.size() == 0 || channel_output.dims()[0] != d_in ||
      choi.rows() != d_in * d_out || choi.cols() != d_in * d_out) {
    throw linops::DimensionMismatch(
        "Choi matrix does not match the dimension of subsystem '" +
        std::string(act_on) + "'");
  }
  for (std::size_t e = 1; e < channel_output.size(); ++e) {
    if (reg.contains(channel_output.labels()[e])) {
      throw RegisterError(
          "extension label '" + channel_output.labels()[e] +
          "' already present in the input");
    }
  }

  // Accumulate on rest ⊗ (act_on, extension...), then move the output
  // factors back into act_on's slot.
  const QubitRegister rest = reg.without({std::string(act_on)});
  const Labels on{std::string(act_on)};
  CMatrix acc = CMatrix::Zero(rest.dim() * d_out, rest.dim() * d_out);
  for (Eigen::Index i = 0; i < d_in; ++i) {
    for (Eigen::Index j = 0; j < d_in; ++j) {
      const auto r_ij = choi.block(i * d_out, j * d_out, d_out, d_out);
      if (r_ij.cwiseAbs().maxCoeff() == 0.0) continue;
      acc += linops::kron(operator_block(rho, reg, on, i, j), r_ij);
    }
  }
  const QubitRegister target = output_register(reg, act_on, channel_output);
  Labels staged_labels = rest.labels();
  std::vector<int> staged_dims = rest.dims();
  for (std::size_t e = 0; e < channel_output.size(); ++e) {
    staged_labels.push_back(e == 0 ? std::string(act_on) : channel_output.labels()[e]);
    staged_dims.push_back(channel_output.dims()[e]);
  }
  const QubitRegister staged(std::move(staged_labels), std::move(staged_dims));
  return permute_factors(acc, staged, target.labels());
}

DensityOperator apply_choi(
    const DensityOperator& rho, const ChoiOperator& choi,
    std::string_view act_on) {
  CMatrix out = apply_choi(
      rho.matrix(), rho.reg(), act_on, choi.matrix(), choi.output_factors());
  const bool tp = std::abs(choi.scale() - 1.0) <= 1e-9;
  const bool valid = choi.cp_flag() && rho.psd_asserted();
  return DensityOperator(
      choi_output_register(rho.reg(), act_on, choi), out,
      rho.normalized() && tp,
      valid ? Validation::kFull : Validation::kHermitianOnly);
}

double verify_recovery(
    const DensityOperator& target, const DensityOperator& marginal,
    const ChoiOperator& choi) {
  const auto& act_on = choi.input_label();
  const QubitRegister reg = choi_output_register(marginal.reg(), act_on, choi);
  CMatrix m = apply_choi(
      marginal.matrix(), marginal.reg(), act_on, choi.matrix(),
      choi.output_factors());
  if (!(reg == target.reg())) {
    auto sorted = [](Labels l) {
      std::sort(l.begin(), l.end());
      return l;
    };
    if (sorted(reg.labels()) != sorted(target.labels()) ||
        reg.dim() != target.dim()) {
      throw RegisterError("recovered state and target have different subsystems");
    }
    m = permute_factors(m, reg, target.labels());
  }
  return max_abs(m - target.matrix());
}

std::vector<BlockOperator> theta_blocks(
    const DensityOperator& rho, std::string_view condition_on) {
  const Labels on{std::string(condition_on)};
  const QubitRegister rest = rho.reg().without(on);
  const Eigen::Index d = rho.reg().dim_of(condition_on);
  std::vector<BlockOperator> out;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      out.push_back({i, j, rest, operator_block(rho.matrix(), rho.reg(), on, i, j)});
    }
  }
  return out;
}

ConsistencyReport marginal_block_consistency(
    const DensityOperator& rho_full, const std::string& keep,
    const Labels& extend_to, double tol) {
  const auto& reg = rho_full.reg();
  reg.position(keep);
  for (const auto& e : extend_to) {
    reg.position(e);
    if (e == keep) throw RegisterError("keep and extend_to overlap");
  }
  Labels index_labels;
  for (const auto& l : reg.labels()) {
    if (l != keep &&
        std::find(extend_to.begin(), extend_to.end(), l) == extend_to.end()) {
      index_labels.push_back(l);
    }
  }
  if (index_labels.empty()) {
    throw RegisterError("no subsystem left to index the blocks");
  }

  const QubitRegister block_reg = reg.without(index_labels);
  Eigen::Index n = 1;
  for (const auto& l : index_labels) n *= reg.dim_of(l);

  ConsistencyReport report;
  report.tol = tol;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      CMatrix m = operator_block(rho_full.matrix(), reg, index_labels, i, j);
      CMatrix t = partial_trace(m, block_reg, extend_to);
      report.blocks.push_back({i, j, block_reg, std::move(m)});
      report.traced_blocks.push_back({i, j, block_reg.without(extend_to), std::move(t)});
    }
  }

  const std::size_t count = report.blocks.size();
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t q = p + 1; q < count; ++q) {
      const auto& tp = report.traced_blocks[p].matrix;
      const auto& tq = report.traced_blocks[q].matrix;
      if (max_abs(tp - tq) > tol) continue;
      const double gap = max_abs(report.blocks[p].matrix - report.blocks[q].matrix);
      if (gap <= tol) continue;
      report.consistent = false;
      report.witnesses.push_back(
          {report.blocks[p].row, report.blocks[p].col, report.blocks[q].row,
           report.blocks[q].col, tp, gap});
    }
  }

  // Null space of the traced blocks, as columns of a (d_keep^2 x count) matrix.
  const Eigen::Index tdim = report.traced_blocks[0].matrix.size();
  const Eigen::Index fdim = report.blocks[0].matrix.size();
  CMatrix traced(tdim, Eigen::Index(count));
  CMatrix full(fdim, Eigen::Index(count));
  for (std::size_t k = 0; k < count; ++k) {
    traced.col(Eigen::Index(k)) = report.traced_blocks[k].matrix.reshaped();
    full.col(Eigen::Index(k)) = report.blocks[k].matrix.reshaped();
  }
  Eigen::JacobiSVD<CMatrix> svd(traced, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  for (Eigen::Index k = 0; k < Eigen::Index(count); ++k) {
    const double sk = k < s.size() ? s(k) : 0.0;
    if (sk > tol * std::max(smax, 1.0)) continue;
    const CVector relation = svd.matrixV().col(k);
    if ((full * relation).cwiseAbs().maxCoeff() > tol) {
      report.linear_extension_exists = false;
      break;
    }
  }
  return report;
}

}  // namespace qmarkov
