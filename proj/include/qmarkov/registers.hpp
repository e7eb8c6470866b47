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

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmarkov/linops.hpp"

namespace qmarkov {

using Complex = std::complex<double>;
using CMatrix = linops::CMatrix<double>;
using CVector = linops::CVector<double>;
using RVector = linops::RVector<double>;
using Labels = std::vector<std::string>;

class RegisterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered, labeled tensor factors.  Basis ordering is big-endian over the
/// label list: |abcd> sits at index 8a + 4b + 2c + d.
class QubitRegister {
 public:
  QubitRegister() = default;
  explicit QubitRegister(Labels labels);
  QubitRegister(Labels labels, std::vector<int> dims);

  const Labels& labels() const { return labels_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return labels_.size(); }
  Eigen::Index dim() const;

  bool contains(std::string_view label) const;
  std::size_t position(std::string_view label) const;
  int dim_of(std::string_view label) const { return dims_[position(label)]; }
  Eigen::Index stride_of(std::string_view label) const;

  /// Factors not in `drop`, in register order.
  QubitRegister without(const Labels& drop) const;
  /// The given labels, in the given order.
  QubitRegister select(const Labels& labels) const;
  /// Concatenation; throws on a label collision.
  QubitRegister concat(const QubitRegister& other) const;

  bool operator==(const QubitRegister& other) const = default;

 private:
  Labels labels_;
  std::vector<int> dims_;
};

// Index-level operations on raw matrices over a register.  These carry no
// Hermiticity or positivity assumptions.

CMatrix partial_trace(
    const CMatrix& m, const QubitRegister& reg, const Labels& drop);
CMatrix partial_transpose(
    const CMatrix& m, const QubitRegister& reg, std::string_view label);
/// <i|_on m |j>_on, acting on the remaining factors.  `i` and `j` are
/// multi-indices over `on`, big-endian in the order given.
CMatrix operator_block(
    const CMatrix& m, const QubitRegister& reg, const Labels& on,
    Eigen::Index i, Eigen::Index j);
/// Reorders tensor factors; `order` is a permutation of reg.labels().
CMatrix permute_factors(
    const CMatrix& m, const QubitRegister& reg, const Labels& order);
/// I ⊗ |j><j|_label ⊗ I.
CMatrix basis_projector(
    const QubitRegister& reg, std::string_view label, Eigen::Index j);

enum class Validation { kFull, kHermitianOnly };

/// Hermitian matrix over a register.  With Validation::kFull it is also
/// PSD (eigenvalue floor -1e-10) and, when normalized, of unit trace.
class DensityOperator {
 public:
  static constexpr double kPsdFloor = -1e-10;
  static constexpr double kTraceTol = 1e-10;

  DensityOperator(
      QubitRegister reg, const CMatrix& matrix, bool normalized = true,
      Validation validation = Validation::kFull);

  const QubitRegister& reg() const { return reg_; }
  const Labels& labels() const { return reg_.labels(); }
  const CMatrix& matrix() const { return matrix_; }
  bool normalized() const { return normalized_; }
  bool psd_asserted() const { return psd_asserted_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  double trace() const { return matrix_.trace().real(); }

 private:
  QubitRegister reg_;
  CMatrix matrix_;
  bool normalized_;
  bool psd_asserted_;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator partial_trace(const DensityOperator& rho, const Labels& drop);
/// PSD is not asserted on the result; applying twice returns the input.
DensityOperator partial_transpose(
    const DensityOperator& rho, std::string_view label);
/// Convex combination weight * a + (1 - weight) * b on identical registers.
DensityOperator mix(
    const DensityOperator& a, const DensityOperator& b, double weight);

CVector ket(std::string_view bits);
DensityOperator pure_state(QubitRegister reg, const CVector& psi);
DensityOperator basis_state(std::string label, int j, int dim = 2);

/// Choi matrix J = sum_ij |i><j|_in ⊗ N(|i><j|) on input ⊗ copy ⊗ extension.
/// The output of the channel is copy ⊗ extension; the copy is the same
/// physical system as the input.
struct ChoiTolerances {
  double trace_preserving = 1e-9;
  double psd = 1e-10;
};

class ChoiOperator {
 public:
  using Tolerances = ChoiTolerances;

  ChoiOperator(
      std::string input_label, std::string copy_label,
      Labels extension_labels, const CMatrix& matrix, bool cp_flag,
      std::vector<int> dims = {}, ChoiTolerances tol = {});

  const std::string& input_label() const { return input_; }
  const std::string& copy_label() const { return copy_; }
  const Labels& extension_labels() const { return extension_; }
  const CMatrix& matrix() const { return matrix_; }
  bool cp_flag() const { return cp_; }
  /// c such that Tr_out J = c I.
  double scale() const { return scale_; }

  /// input ⊗ copy ⊗ extension.
  const QubitRegister& reg() const { return reg_; }
  /// copy ⊗ extension.
  QubitRegister output_factors() const;
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  /// N(|i><j|).
  CMatrix output_block(Eigen::Index i, Eigen::Index j) const;
  /// Tr over copy ⊗ extension.
  CMatrix reduced_input() const;

 private:
  std::string input_;
  std::string copy_;
  Labels extension_;
  QubitRegister reg_;
  CMatrix matrix_;
  bool cp_;
  double scale_ = 1.0;
};

ChoiOperator choi_from_kraus(
    std::string input_label, std::string copy_label, Labels extension_labels,
    std::span<const CMatrix> kraus, int input_dim = 2,
    std::vector<int> extension_dims = {});

enum class StateName { kGhz4, kW4, kMix, kRho2, kGhz3, kConvexMix };
enum class ChannelName {
  kAppendZero,
  kGhzIsometry,
  kWRecovery,
  kMeasureAndAppend,
  kIdentity,
};

std::optional<StateName> parse_state_name(std::string_view name);
std::string to_string(StateName name);
std::optional<ChannelName> parse_channel_name(std::string_view name);
std::string to_string(ChannelName name);

/// Builtin states on labels A,B,C,D (A,B,C for GHZ3).  `param` is p for MIX
/// (p W4 + (1-p) GHZ4) and lambda for CONVEX_MIX (lambda W4 + (1-lambda) RHO2).
DensityOperator make_state(StateName name, double param = 0.0);

/// Builtin channels C -> C D with copy label C'.  IDENTITY maps C -> C.
ChoiOperator make_channel_choi(ChannelName name);

}  // namespace qmarkov
