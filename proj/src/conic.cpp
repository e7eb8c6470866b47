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

#include "qmarkov/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmarkov {
namespace conic {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kDataHermitianTol = 1e-12;
constexpr std::size_t kHistoryPoints = 200;

}  // namespace

VectorXd svec(const CMatrix& h) {
  const Index d = h.rows();
  VectorXd v(d * d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) v(k++) = h(i, i).real();
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      v(k++) = kSqrt2 * h(i, j).real();
      v(k++) = kSqrt2 * h(i, j).imag();
    }
  }
  return v;
}

CMatrix smat(const VectorXd& v, Index dim) {
  if (v.size() != dim * dim) {
    throw std::invalid_argument("svec length does not match dimension");
  }
  CMatrix h(dim, dim);
  Index k = 0;
  for (Index i = 0; i < dim; ++i) h(i, i) = v(k++);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = i + 1; j < dim; ++j) {
      const Complex z(v(k) / kSqrt2, v(k + 1) / kSqrt2);
      h(i, j) = z;
      h(j, i) = std::conj(z);
      k += 2;
    }
  }
  return h;
}

double hermitian_inner(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.transpose().array()).sum().real();
}

std::size_t ConicProblem::add_psd_block(std::string name, Index dim) {
  if (dim < 1) throw MalformedProblem("PSD block dimension must be positive");
  blocks_.push_back({std::move(name), dim});
  return blocks_.size() - 1;
}

std::size_t ConicProblem::add_free_scalar(std::string name) {
  scalars_.push_back(std::move(name));
  return scalars_.size() - 1;
}

void ConicProblem::check_block(std::size_t k, const CMatrix& data) const {
  if (k >= blocks_.size()) {
    throw MalformedProblem("reference to undeclared PSD block " + std::to_string(k));
  }
  if (data.rows() != blocks_[k].dim || data.cols() != blocks_[k].dim) {
    throw MalformedProblem("data matrix does not match block '" + blocks_[k].name + "'");
  }
  if (linops::max_asymmetry(data) > kDataHermitianTol) {
    throw MalformedProblem("data matrix for block '" + blocks_[k].name + "' is not Hermitian");
  }
}

void ConicProblem::check_scalar(std::size_t m) const {
  if (m >= scalars_.size()) {
    throw MalformedProblem("reference to undeclared scalar " + std::to_string(m));
  }
}

void ConicProblem::add_equality(Equality e) {
  for (const auto& [k, data] : e.block_terms) check_block(k, data);
  for (const auto& [m, g] : e.scalar_terms) check_scalar(m);
  if (!std::isfinite(e.rhs)) throw MalformedProblem("non-finite right-hand side");
  equalities_.push_back(std::move(e));
}

void ConicProblem::add_map_equality(
    const HermitianMap& map,
    const std::vector<std::pair<std::size_t, double>>& weighted_blocks,
    const std::vector<std::pair<std::size_t, CMatrix>>& scalar_terms,
    const CMatrix& target) {
  if (weighted_blocks.empty()) throw MalformedProblem("map equality without blocks");
  const std::size_t k0 = weighted_blocks.front().first;
  if (k0 >= blocks_.size()) throw MalformedProblem("reference to undeclared PSD block");
  const Index din = blocks_[k0].dim;
  for (const auto& [k, w] : weighted_blocks) {
    if (k >= blocks_.size() || blocks_[k].dim != din) {
      throw MalformedProblem("map equality blocks must share one dimension");
    }
  }
  for (const auto& [m, g] : scalar_terms) check_scalar(m);
  if (linops::max_asymmetry(target) > kDataHermitianTol) {
    throw MalformedProblem("map equality target is not Hermitian");
  }

  // Column p holds svec(L(E_p)) for the p-th svec basis element E_p.
  const Index nin = din * din;
  const VectorXd rhs = svec(target);
  MatrixXd columns(rhs.size(), nin);
  for (Index p = 0; p < nin; ++p) {
    const CMatrix image = map(smat(VectorXd::Unit(nin, p), din));
    if (image.rows() != target.rows() || image.cols() != target.cols()) {
      throw MalformedProblem("map output does not match the target shape");
    }
    if (linops::max_asymmetry(image) > 1e-10) {
      throw MalformedProblem("map is not Hermitian-preserving");
    }
    columns.col(p) = svec(image);
  }
  std::vector<VectorXd> scalar_coeffs;
  for (const auto& [m, g] : scalar_terms) scalar_coeffs.push_back(svec(g));

  for (Index q = 0; q < rhs.size(); ++q) {
    Equality e;
    const CMatrix data = smat(columns.row(q).transpose(), din);
    for (const auto& [k, w] : weighted_blocks) e.block_terms.emplace_back(k, w * data);
    for (std::size_t s = 0; s < scalar_terms.size(); ++s) {
      if (scalar_coeffs[s](q) != 0.0) {
        e.scalar_terms.emplace_back(scalar_terms[s].first, scalar_coeffs[s](q));
      }
    }
    e.rhs = rhs(q);
    equalities_.push_back(std::move(e));
  }
}

void ConicProblem::set_objective(Objective objective) {
  for (const auto& [k, data] : objective.block_terms) check_block(k, data);
  for (const auto& [m, g] : objective.scalar_terms) check_scalar(m);
  objective_ = std::move(objective);
}

Index ConicProblem::num_variables() const {
  Index n = 0;
  for (const auto& b : blocks_) n += b.dim * b.dim;
  return n + Index(scalars_.size());
}

Index ConicProblem::block_offset(std::size_t k) const {
  Index off = 0;
  for (std::size_t i = 0; i < k; ++i) off += blocks_[i].dim * blocks_[i].dim;
  return off;
}

Index ConicProblem::scalar_offset(std::size_t m) const {
  return block_offset(blocks_.size()) + Index(m);
}

ConicProblem::Vectorized ConicProblem::vectorize() const {
  Vectorized out;
  const Index n = num_variables();
  const Index m = Index(equalities_.size());
  out.a = MatrixXd::Zero(m, n);
  out.b.resize(m);
  out.c = VectorXd::Zero(n);
  for (Index r = 0; r < m; ++r) {
    const auto& e = equalities_[r];
    for (const auto& [k, data] : e.block_terms) {
      out.a.row(r).segment(block_offset(k), blocks_[k].dim * blocks_[k].dim) +=
          svec(data).transpose();
    }
    for (const auto& [s, g] : e.scalar_terms) out.a(r, scalar_offset(s)) += g;
    out.b(r) = e.rhs;
  }
  for (const auto& [k, data] : objective_.block_terms) {
    out.c.segment(block_offset(k), blocks_[k].dim * blocks_[k].dim) += svec(data);
  }
  for (const auto& [s, g] : objective_.scalar_terms) out.c(scalar_offset(s)) += g;
  return out;
}

VectorXd ConicProblem::residuals(
    const std::vector<CMatrix>& block_values,
    const std::vector<double>& scalar_values) const {
  if (block_values.size() != blocks_.size() || scalar_values.size() != scalars_.size()) {
    throw MalformedProblem("value lists do not match the declared variables");
  }
  VectorXd r(equalities_.size());
  for (std::size_t q = 0; q < equalities_.size(); ++q) {
    const auto& e = equalities_[q];
    double acc = -e.rhs;
    for (const auto& [k, data] : e.block_terms) acc += hermitian_inner(data, block_values[k]);
    for (const auto& [s, g] : e.scalar_terms) acc += g * scalar_values[s];
    r(Index(q)) = acc;
  }
  return r;
}

void SolverConfig::validate() const {
  if (!(eps_feas > 0 && eps_psd > 0 && eps_infeasible > 0 && eps_converge > 0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(eps_feas < eps_infeasible)) {
    throw std::invalid_argument("eps_feas must be smaller than eps_infeasible");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(rho > 0)) throw std::invalid_argument("rho must be positive");
  if (!(relaxation > 0 && relaxation < 2)) {
    throw std::invalid_argument("relaxation must lie in (0, 2)");
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "OPTIMAL";
    case Status::kFeasible:
      return "FEASIBLE";
    case Status::kInfeasible:
      return "INFEASIBLE";
    case Status::kMaxIter:
      return "MAX_ITER";
  }
  return "?";
}

namespace {

// Euclidean projection onto the product of PSD cones and free scalars.
class ConeProjector {
 public:
  explicit ConeProjector(const ConicProblem& p) {
    for (std::size_t k = 0; k < p.blocks().size(); ++k) {
      offsets_.push_back(p.block_offset(k));
      dims_.push_back(p.blocks()[k].dim);
    }
  }

  void project(VectorXd& v) const {
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const Index d = dims_[k];
      auto seg = v.segment(offsets_[k], d * d);
      const CMatrix h = smat(seg, d);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
      const VectorXd lam = es.eigenvalues().cwiseMax(0.0);
      const CMatrix& u = es.eigenvectors();
      seg = svec(u * lam.cast<Complex>().asDiagonal() * u.adjoint());
    }
  }

  double min_eigenvalue(const VectorXd& v) const {
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const Index d = dims_[k];
      const CMatrix h = smat(v.segment(offsets_[k], d * d), d);
      out = std::min(out, linops::eigh(h).min());
    }
    return dims_.empty() ? 0.0 : out;
  }

 private:
  std::vector<Index> offsets_;
  std::vector<Index> dims_;
};

class History {
 public:
  void push(int iteration, double value) { raw_.emplace_back(iteration, value); }

  std::vector<std::pair<int, double>> downsampled() const {
    if (raw_.size() <= kHistoryPoints) return raw_;
    std::vector<std::pair<int, double>> out;
    const double step = double(raw_.size() - 1) / double(kHistoryPoints - 1);
    for (std::size_t i = 0; i < kHistoryPoints; ++i) {
      out.push_back(raw_[std::size_t(std::llround(step * double(i)))]);
    }
    return out;
  }

 private:
  std::vector<std::pair<int, double>> raw_;
};

struct Phase1Result {
  VectorXd z;
  bool feasible = false;
  bool converged = false;
  double residual_norm = 0.0;
  int iterations = 0;
};

// min 1/2 |A x - b|^2 over the cone, by ADMM on x = z.
Phase1Result phase_one(
    const ConicProblem::Vectorized& data, const ConeProjector& cone,
    const SolverConfig& cfg, History& history) {
  const Index n = data.a.cols();
  const double rho = cfg.rho;
  const double alpha = cfg.relaxation;
  const MatrixXd gram = data.a.transpose() * data.a + rho * MatrixXd::Identity(n, n);
  const Eigen::LLT<MatrixXd> chol(gram);
  const VectorXd atb = data.a.transpose() * data.b;

  Phase1Result out;
  VectorXd z = VectorXd::Zero(n), u = VectorXd::Zero(n);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const VectorXd x = chol.solve(atb + rho * (z - u));
    const VectorXd xh = alpha * x + (1.0 - alpha) * z;
    VectorXd z_new = xh + u;
    cone.project(z_new);
    u += xh - z_new;

    const double r_pri = (x - z_new).norm();
    const double r_dual = rho * (z_new - z).norm();
    z = std::move(z_new);

    const VectorXd res = data.a * z - data.b;
    const double res_max = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
    history.push(it, res_max);
    out.iterations = it;
    if (res_max <= cfg.eps_feas) {
      out.feasible = true;
      out.converged = true;
      out.residual_norm = res.norm();
      break;
    }
    if (r_pri <= cfg.eps_converge && r_dual <= cfg.eps_converge) {
      out.converged = true;
      out.residual_norm = res.norm();
      break;
    }
    out.residual_norm = res.norm();
  }
  out.z = std::move(z);
  return out;
}

struct Phase2Result {
  VectorXd z;
  bool converged = false;
  int iterations = 0;
};

// min c^T x s.t. A x = b, x in cone; ADMM with an exact affine projection.
Phase2Result phase_two(
    const ConicProblem::Vectorized& data, const ConeProjector& cone,
    const SolverConfig& cfg, VectorXd z, int iteration_offset, History& history) {
  const Index n = data.a.cols();
  const double rho = cfg.rho;
  const double alpha = cfg.relaxation;
  const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(data.a);
  const MatrixXd pinv = cod.pseudoInverse();
  const MatrixXd null_proj = MatrixXd::Identity(n, n) - pinv * data.a;
  const VectorXd x0 = pinv * data.b;
  const VectorXd shift = data.c / rho;

  Phase2Result out;
  VectorXd u = VectorXd::Zero(n);
  const int budget = cfg.max_iterations - iteration_offset;
  for (int it = 1; it <= budget; ++it) {
    const VectorXd x = null_proj * (z - u - shift) + x0;
    const VectorXd xh = alpha * x + (1.0 - alpha) * z;
    VectorXd z_new = xh + u;
    cone.project(z_new);
    u += xh - z_new;

    const double r_pri = (x - z_new).norm();
    const double r_dual = rho * (z_new - z).norm();
    z = std::move(z_new);
    out.iterations = it;

    const VectorXd res = data.a * z - data.b;
    const double res_max = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
    history.push(iteration_offset + it, res_max);
    if (r_pri <= cfg.eps_converge && r_dual <= cfg.eps_converge &&
        res_max <= cfg.eps_feas) {
      out.converged = true;
      break;
    }
  }
  out.z = std::move(z);
  return out;
}

void unpack(const ConicProblem& p, const VectorXd& z, ConicSolution& sol) {
  sol.block_values.clear();
  sol.scalar_values.clear();
  for (std::size_t k = 0; k < p.blocks().size(); ++k) {
    const Index d = p.blocks()[k].dim;
    sol.block_values.push_back(smat(z.segment(p.block_offset(k), d * d), d));
  }
  for (std::size_t m = 0; m < p.scalars().size(); ++m) {
    sol.scalar_values.push_back(z(p.scalar_offset(m)));
  }
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverConfig& config) {
  config.validate();
  const auto data = problem.vectorize();
  const ConeProjector cone(problem);
  History history;
  ConicSolution sol;

  const auto p1 = phase_one(data, cone, config, history);
  sol.phase1_residual = p1.residual_norm;
  sol.iterations = p1.iterations;
  VectorXd z = p1.z;

  if (p1.feasible) {
    if (data.c.isZero(0.0)) {
      sol.status = Status::kFeasible;
    } else {
      auto p2 = phase_two(data, cone, config, z, p1.iterations, history);
      sol.iterations += p2.iterations;
      const VectorXd res = data.a * p2.z - data.b;
      const double res_max = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
      if (res_max <= config.eps_feas) {
        z = std::move(p2.z);
        sol.status = p2.converged ? Status::kOptimal : Status::kFeasible;
      } else {
        // Fall back to the phase-1 point, which is known to be feasible.
        sol.status = Status::kFeasible;
      }
    }
  } else if (p1.converged && p1.residual_norm > config.eps_infeasible) {
    sol.status = Status::kInfeasible;
  } else {
    sol.status = Status::kMaxIter;
  }

  unpack(problem, z, sol);
  const VectorXd res = data.a * z - data.b;
  sol.primal_residual = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
  sol.min_eigenvalue = cone.min_eigenvalue(z);
  sol.objective_value = data.c.dot(z);
  sol.residual_history = history.downsampled();
  if (sol.feasible() && (sol.primal_residual > config.eps_feas ||
                         sol.min_eigenvalue < -config.eps_psd)) {
    sol.status = Status::kMaxIter;
  }
  return sol;
}

}  // namespace conic
}  // namespace qmarkov
