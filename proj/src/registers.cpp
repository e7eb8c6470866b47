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

#include "qmarkov/registers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace qmarkov {

namespace {

// Digit decomposition of a flat index over a register.
struct IndexMap {
  std::vector<Eigen::Index> strides;
  const std::vector<int>* dims;

  explicit IndexMap(const QubitRegister& reg) : dims(&reg.dims()) {
    strides.assign(reg.size(), 1);
    for (std::size_t k = reg.size(); k-- > 1;) {
      strides[k - 1] = strides[k] * reg.dims()[k];
    }
  }
  int digit(Eigen::Index idx, std::size_t k) const {
    return static_cast<int>((idx / strides[k]) % (*dims)[k]);
  }
};

// Flat index of the sub-register formed by `positions`, for every full index.
std::vector<Eigen::Index> sub_indices(
    const QubitRegister& reg, const std::vector<std::size_t>& positions) {
  const IndexMap map(reg);
  std::vector<Eigen::Index> out(reg.dim());
  for (Eigen::Index idx = 0; idx < reg.dim(); ++idx) {
    Eigen::Index sub = 0;
    for (auto k : positions) sub = sub * reg.dims()[k] + map.digit(idx, k);
    out[idx] = sub;
  }
  return out;
}

std::vector<std::size_t> positions_of(
    const QubitRegister& reg, const Labels& labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(reg.position(l));
  return out;
}

std::vector<std::size_t> complement_positions(
    const QubitRegister& reg, const std::vector<std::size_t>& taken) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < reg.size(); ++k) {
    if (std::find(taken.begin(), taken.end(), k) == taken.end()) {
      out.push_back(k);
    }
  }
  return out;
}

void check_square(const CMatrix& m, const QubitRegister& reg) {
  if (m.rows() != m.cols() || m.rows() != reg.dim()) {
    throw RegisterError(
        "matrix of size " + std::to_string(m.rows()) + "x" +
        std::to_string(m.cols()) + " does not match register dimension " +
        std::to_string(reg.dim()));
  }
}

}  // namespace

QubitRegister::QubitRegister(Labels labels)
    : QubitRegister(labels, std::vector<int>(labels.size(), 2)) {}

QubitRegister::QubitRegister(Labels labels, std::vector<int> dims)
    : labels_(std::move(labels)), dims_(std::move(dims)) {
  if (labels_.size() != dims_.size()) {
    throw RegisterError("label and dimension lists differ in length");
  }
  std::set<std::string> seen;
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k].empty()) throw RegisterError("empty subsystem label");
    if (!seen.insert(labels_[k]).second) {
      throw RegisterError("duplicate subsystem label '" + labels_[k] + "'");
    }
    if (dims_[k] < 1) {
      throw RegisterError("subsystem '" + labels_[k] + "' has dimension < 1");
    }
  }
}

Eigen::Index QubitRegister::dim() const {
  Eigen::Index d = 1;
  for (int x : dims_) d *= x;
  return d;
}

bool QubitRegister::contains(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t QubitRegister::position(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw RegisterError("unknown subsystem label '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

Eigen::Index QubitRegister::stride_of(std::string_view label) const {
  Eigen::Index s = 1;
  for (std::size_t k = position(label) + 1; k < dims_.size(); ++k) s *= dims_[k];
  return s;
}

QubitRegister QubitRegister::without(const Labels& drop) const {
  for (const auto& l : drop) position(l);
  Labels labels;
  std::vector<int> dims;
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (std::find(drop.begin(), drop.end(), labels_[k]) == drop.end()) {
      labels.push_back(labels_[k]);
      dims.push_back(dims_[k]);
    }
  }
  return QubitRegister(std::move(labels), std::move(dims));
}

QubitRegister QubitRegister::select(const Labels& labels) const {
  std::vector<int> dims;
  for (const auto& l : labels) dims.push_back(dim_of(l));
  return QubitRegister(labels, std::move(dims));
}

QubitRegister QubitRegister::concat(const QubitRegister& other) const {
  Labels labels = labels_;
  std::vector<int> dims = dims_;
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  return QubitRegister(std::move(labels), std::move(dims));
}

CMatrix partial_trace(
    const CMatrix& m, const QubitRegister& reg, const Labels& drop) {
  check_square(m, reg);
  const auto traced = positions_of(reg, drop);
  const auto kept = complement_positions(reg, traced);
  const auto ki = sub_indices(reg, kept);
  const auto ti = sub_indices(reg, traced);
  Eigen::Index out_dim = 1;
  for (auto k : kept) out_dim *= reg.dims()[k];

  CMatrix out = CMatrix::Zero(out_dim, out_dim);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (ti[r] == ti[c]) out(ki[r], ki[c]) += m(r, c);
    }
  }
  return out;
}

CMatrix partial_transpose(
    const CMatrix& m, const QubitRegister& reg, std::string_view label) {
  check_square(m, reg);
  const auto k = reg.position(label);
  const IndexMap map(reg);
  const Eigen::Index stride = map.strides[k];
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Eigen::Index dr = map.digit(r, k), dc = map.digit(c, k);
      out(r - dr * stride + dc * stride, c - dc * stride + dr * stride) = m(r, c);
    }
  }
  return out;
}

CMatrix operator_block(
    const CMatrix& m, const QubitRegister& reg, const Labels& on,
    Eigen::Index i, Eigen::Index j) {
  check_square(m, reg);
  const auto on_pos = positions_of(reg, on);
  const auto rest_pos = complement_positions(reg, on_pos);
  const auto oi = sub_indices(reg, on_pos);
  const auto ri = sub_indices(reg, rest_pos);
  Eigen::Index on_dim = 1;
  for (auto k : on_pos) on_dim *= reg.dims()[k];
  if (i < 0 || j < 0 || i >= on_dim || j >= on_dim) {
    throw RegisterError("block index out of range");
  }
  const Eigen::Index out_dim = reg.dim() / on_dim;
  CMatrix out = CMatrix::Zero(out_dim, out_dim);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (oi[c] != j) continue;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (oi[r] == i) out(ri[r], ri[c]) = m(r, c);
    }
  }
  return out;
}

CMatrix permute_factors(
    const CMatrix& m, const QubitRegister& reg, const Labels& order) {
  check_square(m, reg);
  if (order.size() != reg.size()) {
    throw RegisterError("permutation must list every subsystem exactly once");
  }
  const auto pos = positions_of(reg, order);
  std::set<std::size_t> unique(pos.begin(), pos.end());
  if (unique.size() != pos.size()) {
    throw RegisterError("permutation repeats a subsystem");
  }
  const auto p = sub_indices(reg, pos);
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) out(p[r], p[c]) = m(r, c);
  }
  return out;
}

CMatrix basis_projector(
    const QubitRegister& reg, std::string_view label, Eigen::Index j) {
  const auto k = reg.position(label);
  if (j < 0 || j >= reg.dims()[k]) {
    throw RegisterError(
        "outcome " + std::to_string(j) + " out of range for subsystem '" +
        std::string(label) + "'");
  }
  const IndexMap map(reg);
  CMatrix out = CMatrix::Zero(reg.dim(), reg.dim());
  for (Eigen::Index r = 0; r < reg.dim(); ++r) {
    if (map.digit(r, k) == j) out(r, r) = 1.0;
  }
  return out;
}

DensityOperator::DensityOperator(
    QubitRegister reg, const CMatrix& matrix, bool normalized,
    Validation validation)
    : reg_(std::move(reg)),
      normalized_(normalized),
      psd_asserted_(validation == Validation::kFull) {
  check_square(matrix, reg_);
  matrix_ = linops::hermitize(matrix);
  if (normalized_ && std::abs(trace() - 1.0) > kTraceTol) {
    throw std::domain_error(
        "normalized state has trace " + std::to_string(trace()));
  }
  if (psd_asserted_ && matrix_.rows() > 0) {
    const double lmin = linops::eigh(matrix_).min();
    if (lmin < kPsdFloor) throw linops::NotPsdError(lmin);
  }
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  QubitRegister reg = a.reg().concat(b.reg());
  CMatrix m = linops::kron(a.matrix(), b.matrix());
  const bool psd = a.psd_asserted() && b.psd_asserted();
  return DensityOperator(
      std::move(reg), m, a.normalized() && b.normalized(),
      psd ? Validation::kFull : Validation::kHermitianOnly);
}

DensityOperator partial_trace(const DensityOperator& rho, const Labels& drop) {
  return DensityOperator(
      rho.reg().without(drop), partial_trace(rho.matrix(), rho.reg(), drop),
      rho.normalized(),
      rho.psd_asserted() ? Validation::kFull : Validation::kHermitianOnly);
}

DensityOperator partial_transpose(
    const DensityOperator& rho, std::string_view label) {
  return DensityOperator(
      rho.reg(), partial_transpose(rho.matrix(), rho.reg(), label),
      rho.normalized(), Validation::kHermitianOnly);
}

DensityOperator mix(
    const DensityOperator& a, const DensityOperator& b, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw std::domain_error(
        "mixing weight " + std::to_string(weight) + " outside [0, 1]");
  }
  if (!(a.reg() == b.reg())) {
    throw RegisterError("cannot mix states on different registers");
  }
  CMatrix m = weight * a.matrix() + (1.0 - weight) * b.matrix();
  const bool psd = a.psd_asserted() && b.psd_asserted();
  return DensityOperator(
      a.reg(), m, a.normalized() && b.normalized(),
      psd ? Validation::kFull : Validation::kHermitianOnly);
}

CVector ket(std::string_view bits) {
  Eigen::Index idx = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') {
      throw std::invalid_argument("ket label must be a bit string");
    }
    idx = 2 * idx + (ch - '0');
  }
  CVector v = CVector::Zero(Eigen::Index(1) << bits.size());
  v(idx) = 1.0;
  return v;
}

DensityOperator pure_state(QubitRegister reg, const CVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw std::domain_error("zero state vector");
  const CVector unit = psi / n;
  return DensityOperator(std::move(reg), unit * unit.adjoint());
}

DensityOperator basis_state(std::string label, int j, int dim) {
  CVector v = CVector::Zero(dim);
  if (j < 0 || j >= dim) throw RegisterError("basis index out of range");
  v(j) = 1.0;
  return pure_state(QubitRegister({std::move(label)}, {dim}), v);
}

ChoiOperator::ChoiOperator(
    std::string input_label, std::string copy_label, Labels extension_labels,
    const CMatrix& matrix, bool cp_flag, std::vector<int> dims, Tolerances tol)
    : input_(std::move(input_label)),
      copy_(std::move(copy_label)),
      extension_(std::move(extension_labels)),
      cp_(cp_flag) {
  Labels labels{input_, copy_};
  labels.insert(labels.end(), extension_.begin(), extension_.end());
  if (dims.empty()) dims.assign(labels.size(), 2);
  if (dims.size() != labels.size()) {
    throw RegisterError("Choi dimension list does not match its labels");
  }
  if (dims[0] != dims[1]) {
    throw RegisterError("Choi input and copy dimensions differ");
  }
  reg_ = QubitRegister(std::move(labels), std::move(dims));
  check_square(matrix, reg_);
  matrix_ = linops::hermitize(matrix);
  if (cp_) {
    const double lmin = linops::eigh(matrix_).min();
    if (lmin < -tol.psd) throw linops::NotPsdError(lmin);
  }
  const CMatrix reduced = reduced_input();
  scale_ = reduced.trace().real() / double(reduced.rows());
  const double dev =
      (reduced - scale_ * CMatrix::Identity(reduced.rows(), reduced.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (dev > tol.trace_preserving) {
    throw std::domain_error(
        "Choi partial trace over the output is not proportional to the "
        "identity (deviation " +
        std::to_string(dev) + ")");
  }
}

QubitRegister ChoiOperator::output_factors() const {
  return reg_.without({input_});
}

Eigen::Index ChoiOperator::input_dim() const { return reg_.dims()[0]; }

Eigen::Index ChoiOperator::output_dim() const {
  return reg_.dim() / input_dim();
}

CMatrix ChoiOperator::output_block(Eigen::Index i, Eigen::Index j) const {
  return operator_block(matrix_, reg_, {input_}, i, j);
}

CMatrix ChoiOperator::reduced_input() const {
  Labels out{copy_};
  out.insert(out.end(), extension_.begin(), extension_.end());
  return partial_trace(matrix_, reg_, out);
}

ChoiOperator choi_from_kraus(
    std::string input_label, std::string copy_label, Labels extension_labels,
    std::span<const CMatrix> kraus, int input_dim,
    std::vector<int> extension_dims) {
  if (extension_dims.empty()) extension_dims.assign(extension_labels.size(), 2);
  Eigen::Index out_dim = input_dim;
  for (int d : extension_dims) out_dim *= d;
  const Eigen::Index n = input_dim * out_dim;
  CMatrix j = CMatrix::Zero(n, n);
  for (const auto& k : kraus) {
    if (k.rows() != out_dim || k.cols() != input_dim) {
      throw RegisterError("Kraus operator has the wrong shape");
    }
    // Unnormalized maximally entangled vector sum_i |i>|K i>.
    CVector v = CVector::Zero(n);
    for (int i = 0; i < input_dim; ++i) v.segment(i * out_dim, out_dim) = k.col(i);
    j += v * v.adjoint();
  }
  std::vector<int> dims{input_dim, input_dim};
  dims.insert(dims.end(), extension_dims.begin(), extension_dims.end());
  return ChoiOperator(
      std::move(input_label), std::move(copy_label),
      std::move(extension_labels), j, true, std::move(dims));
}

namespace {

constexpr std::pair<StateName, std::string_view> kStateNames[] = {
    {StateName::kGhz4, "GHZ4"},   {StateName::kW4, "W4"},
    {StateName::kMix, "MIX"},     {StateName::kRho2, "RHO2"},
    {StateName::kGhz3, "GHZ3"},   {StateName::kConvexMix, "CONVEX_MIX"},
};

constexpr std::pair<ChannelName, std::string_view> kChannelNames[] = {
    {ChannelName::kAppendZero, "APPEND_ZERO"},
    {ChannelName::kGhzIsometry, "GHZ_ISOMETRY"},
    {ChannelName::kWRecovery, "W_RECOVERY"},
    {ChannelName::kMeasureAndAppend, "MEASURE_AND_APPEND"},
    {ChannelName::kIdentity, "IDENTITY"},
};

const Labels kAbcd{"A", "B", "C", "D"};

DensityOperator w4() {
  const CVector psi =
      0.5 * (ket("0001") + ket("0010") + ket("0100") + ket("1000"));
  return pure_state(QubitRegister(kAbcd), psi);
}

DensityOperator ghz4() {
  const CVector psi = (ket("0000") + ket("1111")) / std::sqrt(2.0);
  return pure_state(QubitRegister(kAbcd), psi);
}

DensityOperator rho2() {
  const QubitRegister reg(kAbcd);
  const auto a = pure_state(reg, ket("0000"));
  const auto b = pure_state(reg, ket("1111"));
  return mix(a, b, 0.5);
}

void check_unit_interval(double x, std::string_view what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(
        std::string(what) + " = " + std::to_string(x) + " outside [0, 1]");
  }
}

}  // namespace

std::optional<StateName> parse_state_name(std::string_view name) {
  for (auto [value, text] : kStateNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::string to_string(StateName name) {
  for (auto [value, text] : kStateNames) {
    if (value == name) return std::string(text);
  }
  return "?";
}

std::optional<ChannelName> parse_channel_name(std::string_view name) {
  for (auto [value, text] : kChannelNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::string to_string(ChannelName name) {
  for (auto [value, text] : kChannelNames) {
    if (value == name) return std::string(text);
  }
  return "?";
}

DensityOperator make_state(StateName name, double param) {
  switch (name) {
    case StateName::kGhz4:
      return ghz4();
    case StateName::kW4:
      return w4();
    case StateName::kMix:
      check_unit_interval(param, "p");
      return mix(w4(), ghz4(), param);
    case StateName::kRho2:
      return rho2();
    case StateName::kGhz3: {
      const CVector psi = (ket("000") + ket("111")) / std::sqrt(2.0);
      return pure_state(QubitRegister({"A", "B", "C"}), psi);
    }
    case StateName::kConvexMix:
      check_unit_interval(param, "lambda");
      return mix(w4(), rho2(), param);
  }
  throw std::invalid_argument("unknown state name");
}

ChoiOperator make_channel_choi(ChannelName name) {
  const Labels d{"D"};
  switch (name) {
    case ChannelName::kAppendZero: {
      // |i> -> |i>|0>
      CMatrix v = CMatrix::Zero(4, 2);
      v(0, 0) = 1.0;
      v(2, 1) = 1.0;
      return choi_from_kraus("C", "C'", d, std::span(&v, 1));
    }
    case ChannelName::kGhzIsometry: {
      // |0> -> |00>, |1> -> |11>
      CMatrix v = CMatrix::Zero(4, 2);
      v(0, 0) = 1.0;
      v(3, 1) = 1.0;
      return choi_from_kraus("C", "C'", d, std::span(&v, 1));
    }
    case ChannelName::kWRecovery: {
      const CVector psi0 = (ket("00") + ket("01")) / std::sqrt(2.0);
      const CVector psi1 = ket("10");
      CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
      p0(0, 0) = 1.0;
      p1(1, 1) = 1.0;
      CMatrix j = linops::kron(p0, CMatrix(psi0 * psi0.adjoint()));
      j += linops::kron(p1, CMatrix(psi1 * psi1.adjoint()));
      return ChoiOperator("C", "C'", d, j, true);
    }
    case ChannelName::kMeasureAndAppend: {
      // sum_j |j><j|_C ⊗ |j><j|_C' ⊗ |j><j|_D
      CMatrix j = CMatrix::Zero(8, 8);
      j(0, 0) = 1.0;
      j(7, 7) = 1.0;
      return ChoiOperator("C", "C'", d, j, true);
    }
    case ChannelName::kIdentity: {
      const CMatrix v = CMatrix::Identity(2, 2);
      return choi_from_kraus("C", "C'", {}, std::span(&v, 1));
    }
  }
  throw std::invalid_argument("unknown channel name");
}

}  // namespace qmarkov
