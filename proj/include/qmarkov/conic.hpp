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

// Small dense semidefinite-programming engine.  Variables are Hermitian PSD
// blocks and free real scalars; constraints are real affine equalities
//   sum_k <A_k, X_k> + sum_m g_m s_m = b,
// with <A, X> = Tr(A X).  Hermitian d x d blocks are vectorized isometrically
// into R^{d^2} (diagonal, then sqrt(2)-scaled real and imaginary parts of the
// strict upper triangle), so the cone is a product of real PSD cones.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmarkov/registers.hpp"

namespace qmarkov {
namespace conic {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd svec(const CMatrix& h);
CMatrix smat(const VectorXd& v, Index dim);
/// Hermitian inner product Tr(a b) of two Hermitian matrices.
double hermitian_inner(const CMatrix& a, const CMatrix& b);

class MalformedProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PsdBlock {
  std::string name;
  Index dim = 0;
};

struct Equality {
  std::vector<std::pair<std::size_t, CMatrix>> block_terms;
  std::vector<std::pair<std::size_t, double>> scalar_terms;
  double rhs = 0.0;
};

struct Objective {
  std::vector<std::pair<std::size_t, CMatrix>> block_terms;
  std::vector<std::pair<std::size_t, double>> scalar_terms;
};

/// Real-linear operator on Hermitian matrices; must map Hermitian inputs to
/// Hermitian outputs.
using HermitianMap = std::function<CMatrix(const CMatrix&)>;

class ConicProblem {
 public:
  std::size_t add_psd_block(std::string name, Index dim);
  std::size_t add_free_scalar(std::string name);

  void add_equality(Equality e);

  /// Adds the matrix equation
  ///   sum_k w_k L(X_k) + sum_m s_m G_m = target
  /// as one real equality per svec coordinate of `target`.
  void add_map_equality(
      const HermitianMap& map,
      const std::vector<std::pair<std::size_t, double>>& weighted_blocks,
      const std::vector<std::pair<std::size_t, CMatrix>>& scalar_terms,
      const CMatrix& target);

  void set_objective(Objective objective);

  const std::vector<PsdBlock>& blocks() const { return blocks_; }
  const std::vector<std::string>& scalars() const { return scalars_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  const Objective& objective() const { return objective_; }

  Index num_variables() const;
  Index block_offset(std::size_t k) const;
  Index scalar_offset(std::size_t m) const;

  /// Real data (A, b, c) over the stacked variable vector.
  struct Vectorized {
    MatrixXd a;
    VectorXd b;
    VectorXd c;
  };
  Vectorized vectorize() const;

  /// Constraint residuals sum_k Tr(A_k X_k) + ... - b, evaluated directly
  /// from the Hermitian data.
  VectorXd residuals(
      const std::vector<CMatrix>& block_values,
      const std::vector<double>& scalar_values) const;

 private:
  void check_block(std::size_t k, const CMatrix& data) const;
  void check_scalar(std::size_t m) const;

  std::vector<PsdBlock> blocks_;
  std::vector<std::string> scalars_;
  std::vector<Equality> equalities_;
  Objective objective_;
};

struct SolverConfig {
  double eps_feas = 1e-7;
  double eps_psd = 1e-9;
  double eps_infeasible = 1e-5;
  int max_iterations = 50000;
  /// ADMM penalty and over-relaxation.
  double rho = 1.0;
  double relaxation = 1.6;
  /// Fixed-point tolerance on the ADMM primal and dual residuals.
  double eps_converge = 1e-10;

  void validate() const;
};

enum class Status { kOptimal, kFeasible, kInfeasible, kMaxIter };

std::string to_string(Status s);

struct ConicSolution {
  Status status = Status::kMaxIter;
  double objective_value = 0.0;
  std::vector<CMatrix> block_values;
  std::vector<double> scalar_values;
  /// max-abs constraint residual at the returned point.
  double primal_residual = 0.0;
  double min_eigenvalue = 0.0;
  int iterations = 0;
  /// Euclidean norm of the phase-1 residual at termination.
  double phase1_residual = 0.0;
  /// (iteration, max-abs residual), at most 200 samples.
  std::vector<std::pair<int, double>> residual_history;

  bool feasible() const {
    return status == Status::kOptimal || status == Status::kFeasible;
  }
};

ConicSolution solve(const ConicProblem& problem, const SolverConfig& config = {});

}  // namespace conic
}  // namespace qmarkov
