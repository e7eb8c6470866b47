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
// Independent kernel-inclusion oracle.  Uses plain Eigen only: states are
// built from amplitudes, blocks by explicit index loops, kernels from a dense
// eigendecomposition, and leaks column by column.
//
//   inclusion_oracle                 print the fixture to stdout
//   inclusion_oracle --check FILE    compare against a committed fixture

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Json = nlohmann::ordered_json;

constexpr double kKernelTol = 1e-9;
constexpr double kLeakTol = 1e-8;

Vec basis(int index, int dim) {
  Vec v = Vec::Zero(dim);
  v(index) = 1.0;
  return v;
}

Mat projector(const Vec& v) { return v * v.adjoint(); }

// Four qubits, index 8a + 4b + 2c + d.
Mat ghz4() { return projector((basis(0, 16) + basis(15, 16)) / std::sqrt(2.0)); }
Mat w4() {
  return projector((basis(1, 16) + basis(2, 16) + basis(4, 16) + basis(8, 16)) / 2.0);
}
Mat rho2() { return 0.5 * (projector(basis(0, 16)) + projector(basis(15, 16))); }

// Tr_D of a four-qubit matrix.
Mat drop_d(const Mat& m) {
  Mat out = Mat::Zero(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      for (int d = 0; d < 2; ++d) out(r, c) += m(2 * r + d, 2 * c + d);
  return out;
}

// <j|_C m |j>_C with B (keep_a) or A (!keep_a) traced out, C kept as |j><j|.
// Result on (A or B, C), index 2x + c.
Mat block(const Mat& abc, int j, bool keep_a) {
  Mat out = Mat::Zero(4, 4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int t = 0; t < 2; ++t) {
        const int r = keep_a ? 4 * x + 2 * t + j : 4 * t + 2 * x + j;
        const int c = keep_a ? 4 * y + 2 * t + j : 4 * t + 2 * y + j;
        out(2 * x + j, 2 * y + j) += abc(r, c);
      }
  return out;
}

Mat kernel(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const auto& w = es.eigenvalues();
  const double cut = kKernelTol * std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  int k = 0;
  while (k < w.size() && w(k) <= cut) ++k;
  return es.eigenvectors().leftCols(k);
}

std::string label(int index) {
  return std::string("|") + char('0' + index / 2) + char('0' + index % 2) + ">";
}

Json check(const std::string& name, const Mat& state, double param) {
  const Mat abc = drop_d(state);
  Json outcomes = Json::array();
  bool verdict = true;
  for (int j = 0; j < 2; ++j) {
    const Mat ker_ac = kernel(block(abc, j, true));
    const Mat ker_bc = kernel(block(abc, j, false));
    const Mat outside = Mat::Identity(4, 4) - ker_bc * ker_bc.adjoint();
    double leak = 0.0;
    for (int k = 0; k < ker_ac.cols(); ++k) {
      leak = std::max(leak, (outside * ker_ac.col(k)).norm());
    }
    // Leak through any computational basis vector of Ker(AC).
    double basis_leak = 0.0;
    int basis_vec = -1;
    const Mat p_ac = ker_ac * ker_ac.adjoint();
    for (int b = 0; b < 4; ++b) {
      if ((p_ac * basis(b, 4) - basis(b, 4)).norm() > 1e-9) continue;
      const double n = (outside * basis(b, 4)).norm();
      if (n > basis_leak) basis_leak = n, basis_vec = b;
    }
    const bool contained = leak <= kLeakTol;
    verdict = verdict && contained;
    Json o = {
        {"j", j},
        {"ker_dim_ac", ker_ac.cols()},
        {"ker_dim_bc", ker_bc.cols()},
        {"contained", contained},
        {"max_leak", leak},
    };
    if (!contained && basis_vec >= 0) o["leaking_basis_vector"] = label(basis_vec);
    outcomes.push_back(o);
  }
  return {{"name", name}, {"param", param}, {"verdict", verdict}, {"outcomes", outcomes}};
}

Json fixture() {
  Json cases = Json::array();
  cases.push_back(check("GHZ4", ghz4(), 0.0));
  cases.push_back(check("CONVEX_MIX", 0.5 * w4() + 0.5 * rho2(), 0.5));
  cases.push_back(check("MIX", 0.05 * w4() + 0.95 * ghz4(), 0.05));
  return {{"kernel_tol", kKernelTol}, {"leak_tol", kLeakTol}, {"cases", cases}};
}

bool same(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) {
    return std::abs(a.get<double>() - b.get<double>()) <= 1e-12;
  }
  if (a.type() != b.type() || a.size() != b.size()) return false;
  if (a.is_object()) {
    for (const auto& [k, v] : a.items())
      if (!b.contains(k) || !same(v, b[k])) return false;
    return true;
  }
  if (a.is_array()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!same(a[i], b[i])) return false;
    return true;
  }
  return a == b;
}

}  // namespace

int main(int argc, char** argv) {
  const Json fresh = fixture();
  if (argc == 3 && std::string(argv[1]) == "--check") {
    std::ifstream in(argv[2]);
    if (!in) {
      std::cerr << "cannot open " << argv[2] << '\n';
      return 1;
    }
    const Json committed = Json::parse(in);
    if (!same(fresh, committed)) {
      std::cerr << "fixture differs from oracle output:\n" << fresh.dump(2) << '\n';
      return 1;
    }
    std::cout << "fixture matches oracle\n";
    return 0;
  }
  std::cout << fresh.dump(2) << '\n';
  return 0;
}
