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

// Seeded property suites shared by the unit tests and the acceptance runner.
// Each returns the number of cases checked and the number of violations.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qmarkov/linops.hpp"
#include "qmarkov/markov.hpp"
#include "qmarkov/recovery.hpp"
#include "support/random.hpp"

namespace qmarkov {
namespace testing {

struct Tally {
  std::string name;
  int cases = 0;
  int violations = 0;
  double worst = 0.0;
  std::vector<std::string> messages;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      ++violations;
      if (messages.size() < 5) messages.push_back(what);
    }
  }
  void measure(double error, double bound, const std::string& what) {
    worst = std::max(worst, error);
    check(error <= bound, what + " = " + std::to_string(error));
  }
  bool ok() const { return cases > 0 && violations == 0; }
};

inline double max_abs(const CMatrix& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

/// Ker X ⊆ Ker Y iff Supp Y ⊆ Supp X, rank monotonicity, and complete frames,
/// on PSD pairs with planted inclusions (even seeds) and non-inclusions (odd).
inline Tally duality_and_monotonicity(int pairs = 200, std::uint64_t seed = 1) {
  Tally t{"support-kernel duality and rank monotonicity"};
  const Eigen::Index dims[] = {4, 8, 16};
  for (int s = 0; s < pairs; ++s) {
    Rng rng(seed + s);
    const Eigen::Index n = dims[s % 3];
    const CMatrix u = random_unitary(n, rng);
    const Eigen::Index kx = 1 + static_cast<Eigen::Index>(rng() % (n - 1));
    const Eigen::Index ky = 1 + static_cast<Eigen::Index>(rng() % kx);
    const bool planted = s % 2 == 0;
    CMatrix y_frame = u.leftCols(ky);
    if (!planted) {
      // Tilt one support vector of Y out of Supp X.
      y_frame.col(0) = (u.col(0) + u.col(kx)) / std::sqrt(2.0);
    }
    const CMatrix x = psd_on(u.leftCols(kx), rng);
    const CMatrix y = psd_on(y_frame, rng);

    const auto sx = linops::kernel_split(x);
    const auto sy = linops::kernel_split(y);
    const auto ker = linops::subspace_contained(sx.kernel, sy.kernel, kInclusionTol);
    const auto supp = linops::subspace_contained(sy.support, sx.support, kInclusionTol);
    const std::string tag = " (seed " + std::to_string(s) + ")";
    ++t.cases;
    t.check(ker.contained == supp.contained, "duality" + tag);
    t.check(ker.contained == planted, "planted relation" + tag);
    if (ker.contained) {
      t.check(linops::rank_of(x) >= linops::rank_of(y), "rank monotonicity" + tag);
    }
    for (const auto* split : {&sx, &sy}) {
      const CMatrix frame = split->kernel.projector() + split->support.projector() -
                            CMatrix::Identity(n, n);
      t.measure(max_abs(frame), 1e-10, "frame completeness" + tag);
      t.measure(split->kernel.orthonormality_error(), 1e-10, "orthonormality" + tag);
    }
  }
  return t;
}

/// Conditional-block weights over C sum to the trace, blocks are PSD.
inline Tally weight_conservation(int states = 100, std::uint64_t seed = 1000) {
  Tally t{"conditional block weight conservation"};
  const QubitRegister reg({"A", "B", "C"});
  for (int s = 0; s < states; ++s) {
    Rng rng(seed + s);
    const auto rho = random_state(reg, rng, 1 + s % 8);
    ++t.cases;
    for (const Labels& drop : {Labels{"B"}, Labels{"A"}, Labels{}}) {
      double total = 0.0;
      for (Eigen::Index j = 0; j < 2; ++j) {
        const auto block = conditional_block(rho, "C", j, drop);
        total += block.weight;
        const double lmin = linops::eigh(block.matrix).min();
        t.check(lmin >= -1e-10, "block PSD (seed " + std::to_string(s) + ")");
      }
      t.measure(std::abs(total - rho.trace()), 1e-10,
                "weight sum (seed " + std::to_string(s) + ")");
    }
  }
  return t;
}

/// apply_choi is linear, and CPTP Chois map states to states.
inline Tally channel_properties(int channels = 50, std::uint64_t seed = 5000) {
  Tally t{"apply_choi linearity and CPTP preservation"};
  const QubitRegister reg({"A", "B", "C"});
  for (int s = 0; s < channels; ++s) {
    Rng rng(seed + s);
    const auto choi = random_cptp_choi(rng, 1 + s % 4);
    const auto rho = random_state(reg, rng, 1 + s % 8);
    const auto sigma = random_state(reg, rng);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    const double a = coef(rng), b = coef(rng);
    const auto out_reg = choi_output_register(reg, "C", choi);
    auto raw = [&](const CMatrix& m) {
      return apply_choi(m, reg, "C", choi.matrix(), choi.output_factors());
    };
    const std::string tag = " (seed " + std::to_string(s) + ")";
    ++t.cases;
    const CMatrix lhs = raw(a * rho.matrix() + b * sigma.matrix());
    const CMatrix rhs = a * raw(rho.matrix()) + b * raw(sigma.matrix());
    t.measure(max_abs(lhs - rhs), 1e-11, "linearity" + tag);

    const auto out = apply_choi(rho, choi, "C");
    t.check(out.reg() == out_reg, "output register" + tag);
    t.measure(std::abs(out.trace() - 1.0), 1e-10, "trace" + tag);
    t.check(linops::eigh(out.matrix()).min() >= -1e-10, "output PSD" + tag);
  }
  return t;
}

/// Feasible solves re-checked outside the solver: equalities within
/// 10 eps_feas, PSD within 10 eps_psd, and the recovered Choi reproduces the
/// target within 1e-6.
inline Tally solver_soundness(int instances = 12, std::uint64_t seed = 9000) {
  Tally t{"solver soundness on feasible instances"};
  const conic::SolverConfig config;
  auto recheck = [&](const conic::ConicProblem& problem,
                     const conic::ConicSolution& sol, const std::string& tag) {
    const double res =
        problem.residuals(sol.block_values, sol.scalar_values).cwiseAbs().maxCoeff();
    t.measure(res, 10 * config.eps_feas, "equality residual" + tag);
    for (const auto& x : sol.block_values) {
      t.check(linops::eigh(x).min() >= -10 * config.eps_psd, "PSD" + tag);
    }
  };

  std::vector<std::pair<DensityOperator, DensityOperator>> cases;
  const QubitRegister reg({"A", "B", "C"});
  for (int s = 0; s < instances; ++s) {
    Rng rng(seed + s);
    if (s % 2 == 0) {
      // rho_ABC ⊗ sigma_D: recovered by appending sigma.
      const auto marginal = random_state(reg, rng, 1 + s % 8);
      const auto sigma = random_state(QubitRegister({"D"}), rng);
      cases.emplace_back(marginal, tensor(marginal, sigma));
    } else {
      // sum_j p_j rho_AB^j ⊗ |j><j|_C ⊗ sigma_D^j: measure C, prepare sigma^j.
      const QubitRegister ab({"A", "B"});
      CMatrix m = CMatrix::Zero(8, 8), full = CMatrix::Zero(16, 16);
      for (int j = 0; j < 2; ++j) {
        const CMatrix part = random_psd(4, 1 + s % 4, rng) / 2.0;
        const CMatrix sigma = random_state(QubitRegister({"D"}), rng).matrix();
        CMatrix proj = CMatrix::Zero(2, 2);
        proj(j, j) = 1.0;
        m += linops::kron(part, proj);
        full += linops::kron(linops::kron(part, proj), sigma);
      }
      const double tr = m.trace().real();
      cases.emplace_back(
          DensityOperator(reg, m / tr),
          DensityOperator(QubitRegister({"A", "B", "C", "D"}), full / tr));
    }
  }
  for (const auto name : {StateName::kRho2}) {
    const auto target = make_state(name);
    cases.emplace_back(partial_trace(target, {"D"}), target);
  }
  const auto ghz3 = make_state(StateName::kGhz3);
  cases.emplace_back(ghz3, tensor(ghz3, basis_state("D", 0)));

  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& [marginal, target] = cases[k];
    const std::string tag = " (instance " + std::to_string(k) + ")";
    ++t.cases;
    const auto cert = conic::certify_cptp(marginal, target, config);
    t.check(cert.solution.feasible(), "CPTP solve not feasible" + tag + ": " +
                                          conic::to_string(cert.status));
    if (!cert.solution.feasible()) continue;
    recheck(conic::build_cptp_feasibility(marginal, target), cert.solution, tag);
    t.measure(cert.reconstruction_residual, 1e-6, "reconstruction" + tag);

    const auto ov = conic::sampling_overhead(marginal, target, config);
    t.check(ov.finite(), "overhead not finite" + tag);
    if (!ov.finite()) continue;
    recheck(conic::build_overhead_problem(marginal, target), ov.solution, tag);
    t.measure(std::abs(ov.c1 - ov.c2 - 1.0), 1e-7, "c1 - c2" + tag);
    t.check(ov.cost() >= 1.0 - 1e-7, "c1 + c2 >= 1" + tag);
    t.check(ov.nu >= -1e-7, "nu >= 0" + tag);
  }
  return t;
}

}  // namespace testing
}  // namespace qmarkov
