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
// Acceptance runner.  Prints one PASS/FAIL line per criterion.
//
//   acceptance                  run every criterion
//   acceptance --criterion N    run criterion N only

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmarkov/conic.hpp"
#include "qmarkov/markov.hpp"
#include "qmarkov/recovery.hpp"
#include "qmarkov/registers.hpp"
#include "support/properties.hpp"

namespace {

using namespace qmarkov;
using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Json load_fixture() {
  std::ifstream in(QMARKOV_FIXTURE_DIR "/inclusion_oracle.json");
  if (!in) return nullptr;
  return Json::parse(in);
}

Json fixture_case(const Json& fixture, const std::string& name, double param) {
  if (fixture.is_null()) return nullptr;
  for (const auto& c : fixture["cases"]) {
    if (c["name"] == name && std::abs(c["param"].get<double>() - param) < 1e-12) return c;
  }
  return nullptr;
}

std::pair<int, std::string> run_command(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return {-1, ""};
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::pair<DensityOperator, DensityOperator> w4_pair() {
  auto w4 = make_state(StateName::kW4);
  return {partial_trace(w4, {"D"}), w4};
}

Outcome w4_analytic() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto [marginal, w4] = w4_pair();
  const auto out = apply_choi(marginal, make_channel_choi(ChannelName::kWRecovery), "C");
  const double err = max_abs(out.matrix() - w4.matrix());
  const double dt = seconds_since(t0);
  o.require(err <= 1e-12, "max-abs error " + num(err) + " <= 1e-12");
  o.require(dt < 0.1, "runtime " + num(dt) + " s < 0.1 s");
  return o;
}

Outcome w4_solver() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto [marginal, w4] = w4_pair();
  const auto cert = conic::certify_cptp(marginal, w4);
  o.require(cert.solution.feasible(), "cptp status " + conic::to_string(cert.status));
  o.require(cert.reconstruction_residual <= 1e-6,
            "reconstruction residual " + num(cert.reconstruction_residual) + " <= 1e-6");
  o.require(cert.solution.iterations <= 50000,
            "iterations " + std::to_string(cert.solution.iterations));
  const auto ov = conic::sampling_overhead(marginal, w4);
  const double cost = ov.finite() ? ov.cost() : ov.nu;
  o.require(std::abs(cost - 1.0) <= 1e-5, "c1+c2 = " + num(cost) + " (want 1 +- 1e-5)");
  o.require(std::abs(ov.nu) <= 2e-5, "nu = " + num(ov.nu) + " (want 0 +- 2e-5)");
  const double dt = seconds_since(t0);
  o.require(dt < 10, "runtime " + num(dt) + " s < 10 s");
  return o;
}

Outcome ghz4_non_recoverable() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto ghz = make_state(StateName::kGhz4);
  const auto marginal = partial_trace(ghz, {"D"});
  const auto cert = conic::certify_cptp(marginal, ghz);
  o.require(cert.status == conic::Status::kInfeasible,
            "cptp status " + conic::to_string(cert.status));
  o.require(cert.phase1_residual > 1e-5, "phase-1 residual " + num(cert.phase1_residual) + " > 1e-5");
  const auto ov = conic::sampling_overhead(marginal, ghz);
  o.require(std::isinf(ov.nu) && ov.nu > 0, "hptp nu = " + num(ov.nu));
  const double dt = seconds_since(t0);
  o.require(dt < 10, "runtime " + num(dt) + " s < 10 s");
  return o;
}

Outcome mixture_theorem() {
  Outcome o;
  const auto t0 = Clock::now();
  for (double p : {0.25, 0.5, 0.75}) {
    const auto target = make_state(StateName::kMix, p);
    const auto marginal = partial_trace(target, {"D"});
    const bool inc = kernel_inclusion_check(marginal).verdict;
    const auto ov = conic::sampling_overhead(marginal, target);
    o.require(inc, "p=" + num(p) + " inclusion " + (inc ? "pass" : "fail"));
    o.require(std::isinf(ov.nu) && ov.nu > 0, "p=" + num(p) + " nu " + num(ov.nu));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 30, "runtime " + num(dt) + " s < 30 s");
  return o;
}

Outcome kernel_values() {
  Outcome o;
  const auto [marginal, w4] = w4_pair();
  auto span = [](std::initializer_list<CVector> vs) {
    CMatrix cols(4, static_cast<Eigen::Index>(vs.size()));
    Eigen::Index k = 0;
    for (const auto& v : vs) cols.col(k++) = v;
    return linops::SubspaceBasis<double>::from_columns(cols);
  };
  const std::vector<linops::SubspaceBasis<double>> expected = {
      span({ket("01"), ket("11"), CVector(ket("00") - ket("10"))}),
      span({ket("00"), ket("10"), ket("11")}),
  };
  for (Eigen::Index j = 0; j < 2; ++j) {
    const auto ker = linops::kernel_basis(conditional_block(marginal, "C", j, {"B"}).matrix);
    const auto fwd = linops::subspace_contained(ker, expected[j], 1e-10);
    const auto back = linops::subspace_contained(expected[j], ker, 1e-10);
    const double leak = std::max(fwd.max_leak, back.max_leak);
    o.require(ker.size() == expected[j].size() && fwd.contained && back.contained,
              "j=" + std::to_string(j) + " dim " + std::to_string(ker.size()) + " vs " +
                  std::to_string(expected[j].size()) + ", leak " + num(leak));
  }
  return o;
}

Outcome two_qubit_impossibility() {
  Outcome o;
  const auto r = marginal_block_consistency(make_state(StateName::kW4), "B", {"C", "D"});
  o.require(!r.consistent, std::string("report says ") + (r.consistent ? "consistent" : "inconsistent"));
  CMatrix quarter = CMatrix::Zero(2, 2);
  quarter(0, 0) = 0.25;
  bool found = false;
  for (const auto& w : r.witnesses) {
    found = found || max_abs(w.traced - quarter) <= 1e-12;
  }
  o.require(found, std::to_string(r.witnesses.size()) + " witnesses with traced part 1/4|0><0|");
  return o;
}

Outcome append_channel() {
  Outcome o;
  const auto choi = make_channel_choi(ChannelName::kAppendZero);
  const double tp = max_abs(choi.reduced_input() - CMatrix::Identity(2, 2));
  o.require(tp <= 1e-12, "Tr_{C'D} J - I = " + num(tp));
  const auto ghz3 = make_state(StateName::kGhz3);
  const double res = verify_recovery(tensor(ghz3, basis_state("D", 0)), ghz3, choi);
  o.require(res <= 1e-12, "residual " + num(res));
  return o;
}

Outcome property_suites() {
  Outcome o;
  for (const auto& t :
       {testing::duality_and_monotonicity(200), testing::weight_conservation(100),
        testing::channel_properties(50), testing::solver_soundness(12)}) {
    o.require(t.ok(), t.name + ": " + std::to_string(t.violations) + "/" +
                          std::to_string(t.cases) + " violations");
  }
  return o;
}

Outcome oracle_fixture() {
  Outcome o;
  const auto fixture = load_fixture();
  o.require(!fixture.is_null(), "fixture file present");
  if (fixture.is_null()) return o;
  const auto [code, out] =
      run_command(std::string(QMARKOV_ORACLE) + " --check " QMARKOV_FIXTURE_DIR "/inclusion_oracle.json");
  o.require(code == 0, "independent oracle reproduces the fixture");
  const std::vector<std::tuple<std::string, StateName, double>> cases = {
      {"GHZ4", StateName::kGhz4, 0.0},
      {"CONVEX_MIX", StateName::kConvexMix, 0.5},
      {"MIX", StateName::kMix, 0.05}};
  for (const auto& [name, id, param] : cases) {
    const auto c = fixture_case(fixture, name, param);
    if (c.is_null()) {
      o.require(false, name + " recorded");
      continue;
    }
    bool leaks = true;
    for (const auto& out : c["outcomes"]) leaks = leaks && out.contains("max_leak");
    const auto lib = kernel_inclusion_check(partial_trace(make_state(id, param), {"D"}));
    o.require(leaks && lib.verdict == c["verdict"].get<bool>(),
              name + " verdict " + (c["verdict"].get<bool>() ? "true" : "false") +
                  " (library agrees: " + (lib.verdict == c["verdict"].get<bool>() ? "yes" : "no") + ")");
  }
  return o;
}

Outcome nonconvexity_demo() {
  Outcome o;
  for (const auto& [name, id] : {std::pair{"W4", StateName::kW4}, {"RHO2", StateName::kRho2}}) {
    const auto target = make_state(id);
    const auto cert = conic::certify_cptp(partial_trace(target, {"D"}), target);
    o.require(cert.solution.feasible(), std::string(name) + " cptp " + conic::to_string(cert.status));
  }
  const auto expected = fixture_case(load_fixture(), "CONVEX_MIX", 0.5);
  o.require(!expected.is_null(), "fixture entry present");
  if (expected.is_null()) return o;
  const bool want = expected["verdict"].get<bool>();
  const auto [code, out] = run_command(std::string(QMARKOV_CLI) + " demo nonconvexity");
  bool got = !want;
  bool names_vector = false;
  try {
    const auto mid = Json::parse(out)["results"]["midpoint"]["inclusion"];
    got = mid["verdict"].get<bool>();
    for (const auto& e : mid["outcomes"]) names_vector = names_vector || e.contains("leak_basis_vector");
  } catch (const std::exception&) {
  }
  o.require(got == want, std::string("midpoint verdict ") + (got ? "true" : "false") +
                             " matches fixture");
  if (!want) {
    o.require(code == 2, "exit code " + std::to_string(code) + " == 2");
    o.require(names_vector, "report names a leaking vector");
  } else {
    o.require(code == 0, "exit code " + std::to_string(code) + " == 0");
  }
  return o;
}

Outcome sweep() {
  Outcome o;
  std::vector<double> grid;
  for (int k = 0; k < 21; ++k) grid.push_back(k / 20.0);
  const auto t0 = Clock::now();
  const auto s = conic::recoverability_sweep(
      [](double p) { return make_state(StateName::kMix, p); }, grid);
  const double dt = seconds_since(t0);
  o.require(dt < 60, "21 points in " + num(dt) + " s");
  bool upper = true;
  for (const auto& row : s.rows) {
    if (row.p >= 0.25) upper = upper && row.inclusion_verdict.value_or(false);
  }
  o.require(upper, "inclusion true for every p >= 0.25");
  const auto expected = fixture_case(load_fixture(), "MIX", 0.05);
  const bool match = !expected.is_null() && s.rows[1].inclusion_verdict.has_value() &&
                     *s.rows[1].inclusion_verdict == expected["verdict"].get<bool>();
  o.require(match, "p=0.05 inclusion matches fixture");
  const auto& last = s.rows.back();
  const bool feasible = last.cptp_status == conic::Status::kFeasible ||
                        last.cptp_status == conic::Status::kOptimal;
  o.require(feasible, "p=1 cptp " + (last.cptp_status ? conic::to_string(*last.cptp_status)
                                                       : std::string("error")));
  o.require(std::abs(last.nu) <= 2e-5, "p=1 nu = " + num(last.nu) + " (want 0 +- 2e-5)");
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"W4 recovery, analytic path", w4_analytic},
      {"W4 recovery, solver path", w4_solver},
      {"GHZ4 non-recoverability", ghz4_non_recoverable},
      {"Mixture theorem", mixture_theorem},
      {"Kernel values", kernel_values},
      {"Two-qubit impossibility", two_qubit_impossibility},
      {"Append-channel example", append_channel},
      {"Property suites", property_suites},
      {"Oracle-fixed open items", oracle_fixture},
      {"Non-convexity demo", nonconvexity_demo},
      {"Sweep", sweep},
  };
  return all;
}

bool run_one(std::size_t n) {
  const auto& c = criteria()[n - 1];
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << n << "] " << c.title << ": "
            << o.detail.str() << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t count = criteria().size();
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    const int n = std::atoi(argv[2]);
    if (n < 1 || static_cast<std::size_t>(n) > count) {
      std::cerr << "criterion must be in 1.." << count << '\n';
      return 1;
    }
    return run_one(n) ? 0 : 1;
  }
  if (argc != 1) {
    std::cerr << "usage: acceptance [--criterion N]\n";
    return 1;
  }
  bool all = true;
  for (std::size_t n = 1; n <= count; ++n) all = run_one(n) && all;
  return all ? 0 : 1;
}
