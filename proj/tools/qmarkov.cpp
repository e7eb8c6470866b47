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
// Command-line front end: state construction, inclusion checks, recovery
// certification, sweeps and scripted demonstrations, with JSON reports.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmarkov/conic.hpp"
#include "qmarkov/markov.hpp"
#include "qmarkov/recovery.hpp"
#include "qmarkov/registers.hpp"
#include "qmarkov/report.hpp"

namespace fs = std::filesystem;
using namespace qmarkov;
using report::Json;

namespace {

enum Exit { kPass = 0, kError = 1, kFail = 2, kUndetermined = 3 };

struct Options {
  std::string builtin;
  std::string state_path;
  std::optional<double> p;
  std::optional<double> lambda;
  double tol = kInclusionTol;
  std::string mode = "cptp";
  std::string family = "MIX";
  std::string grid = "0:1:21";
  std::string demo;
  std::string state_name;
  std::string out;
  conic::SolverConfig config;
  bool pretty = false;
  bool verbose = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

fs::path output_path(const std::string& out) {
  fs::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("QMARKOV_OUT_DIR"); dir && *dir) {
      path = fs::path(dir) / path;
    }
  }
  return path;
}

double builtin_param(StateName name, const Options& o) {
  if (name == StateName::kMix) {
    if (!o.p) throw UsageError("MIX needs --p");
    return *o.p;
  }
  if (name == StateName::kConvexMix) {
    if (!o.lambda) throw UsageError("CONVEX_MIX needs --lambda");
    return *o.lambda;
  }
  return 0.0;
}

DensityOperator make_builtin(const std::string& text, const Options& o) {
  const auto name = parse_state_name(text);
  if (!name) throw UsageError("unknown builtin state '" + text + "'");
  const double param = builtin_param(*name, o);
  if (!(param >= 0.0 && param <= 1.0)) {
    throw UsageError("mixing parameter must lie in [0, 1]");
  }
  return make_state(*name, param);
}

Json state_inputs(const Options& o) {
  Json in = Json::object();
  if (!o.builtin.empty()) {
    in["builtin"] = o.builtin;
    if (o.p) in["p"] = *o.p;
    if (o.lambda) in["lambda"] = *o.lambda;
  } else {
    in["state_file"] = o.state_path;
  }
  return in;
}

DensityOperator load_input(const Options& o) {
  if (!o.builtin.empty() && !o.state_path.empty()) {
    throw UsageError("give either --builtin or a state file, not both");
  }
  if (!o.builtin.empty()) return make_builtin(o.builtin, o);
  if (o.state_path.empty()) throw UsageError("no input state given");
  return report::read_state(o.state_path);
}

DensityOperator drop_last(const DensityOperator& rho) {
  return partial_trace(rho, {rho.labels().back()});
}

int status_exit(conic::Status s) {
  switch (s) {
    case conic::Status::kOptimal:
    case conic::Status::kFeasible:
      return kPass;
    case conic::Status::kInfeasible:
      return kFail;
    case conic::Status::kMaxIter:
      return kUndetermined;
  }
  return kError;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("bad grid value '" + s + "'");
    return x;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("grid must be start:stop:count");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const double n = to_double(parts[2]);
    if (n < 1 || n != std::floor(n)) throw UsageError("grid count must be a positive integer");
    const int count = static_cast<int>(n);
    for (int k = 0; k < count; ++k) {
      grid.push_back(count == 1 ? a : a + (b - a) * k / (count - 1));
    }
  } else {
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) grid.push_back(to_double(item));
  }
  if (grid.empty()) throw UsageError("empty grid");
  return grid;
}

std::string fmt(double x) {
  const Json j = report::number(x);
  return j.is_string() ? j.get<std::string>() : j.dump();
}

// Human-readable rendering for --pretty.
void print_pretty(const Json& j, std::ostream& os, const std::string& indent = "") {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      os << indent << key << ":\n";
      print_pretty(value, os, indent + "  ");
    } else if (value.is_array() && !value.empty() && value[0].is_object()) {
      os << indent << key << ":\n";
      for (const auto& e : value) {
        os << indent << "  -";
        for (const auto& [k, v] : e.items()) {
          if (v.is_primitive()) os << ' ' << k << '=' << v.dump();
        }
        os << '\n';
      }
    } else if (value.is_array() && !value.empty() && value[0].is_array()) {
      os << indent << key << ": [" << value.size() << "x" << value[0].size() << " matrix]\n";
    } else {
      os << indent << key << ": " << value.dump() << '\n';
    }
  }
}

void print_sweep_table(const Json& results, std::ostream& os) {
  os << std::left << std::setw(24) << "p" << std::setw(11) << "inclusion"
     << std::setw(12) << "cptp" << std::setw(12) << "hptp" << "nu\n";
  for (const auto& row : results["rows"]) {
    os << std::setw(24) << fmt(row["p"].get<double>()) << std::setw(11)
       << (row["inclusion"].is_null() ? "error" : row["inclusion"].get<bool>() ? "true" : "false")
       << std::setw(12) << (row["cptp"].is_null() ? "-" : row["cptp"].get<std::string>())
       << std::setw(12) << (row["hptp"].is_null() ? "-" : row["hptp"].get<std::string>())
       << fmt(report::parse_number(row["nu"])) << '\n';
  }
  const auto& s = results["smallest_inclusion_p"];
  os << "smallest p passing inclusion: " << (s.is_null() ? "none" : fmt(s.get<double>())) << '\n';
}

void emit(const report::RunReport& r, const Options& o) {
  if (o.pretty) {
    if (r.command == "sweep") {
      print_sweep_table(r.results, std::cout);
    } else {
      print_pretty(report::to_json(r), std::cout);
    }
    return;
  }
  std::cout << report::dump(report::to_json(r)) << '\n';
}

report::RunReport new_report(const std::string& command, const Options& o) {
  report::RunReport r;
  r.command = command;
  r.config = o.config;
  r.timestamp = timestamp();
  return r;
}

int cmd_state(const Options& o) {
  auto r = new_report("state", o);
  Options local = o;
  local.builtin = o.state_name;
  const auto rho = make_builtin(o.state_name, local);
  r.inputs = state_inputs(local);
  r.results["state"] = report::state(rho);
  if (!o.out.empty()) {
    const auto path = output_path(o.out);
    report::write_state(path, rho);
    r.results["written"] = path.string();
  }
  emit(r, o);
  return kPass;
}

int cmd_inclusion(const Options& o) {
  auto r = new_report("inclusion", o);
  r.inputs = state_inputs(o);
  r.inputs["tol"] = o.tol;
  auto rho = load_input(o);
  if (rho.reg().size() == 4) {
    rho = drop_last(rho);
  } else if (rho.reg().size() != 3) {
    throw RegisterError("inclusion needs a 3- or 4-subsystem state");
  }
  const auto inc = kernel_inclusion_check(rho, o.tol);
  r.results = report::inclusion(inc);
  if (o.verbose) {
    Json blocks = Json::array();
    const auto& l = rho.labels();
    for (int j = 0; j < rho.reg().dims()[2]; ++j) {
      blocks.push_back({
          {"j", j},
          {"ac", report::matrix(conditional_block(rho, l[2], j, {l[1]}).matrix)},
          {"bc", report::matrix(conditional_block(rho, l[2], j, {l[0]}).matrix)},
      });
    }
    r.results["conditional_blocks"] = blocks;
  }
  emit(r, o);
  return inc.verdict ? kPass : kFail;
}

int cmd_certify(const Options& o) {
  auto r = new_report("certify", o);
  r.inputs = state_inputs(o);
  r.inputs["mode"] = o.mode;
  const auto target = load_input(o);
  if (target.reg().size() < 2) throw RegisterError("certify needs at least two subsystems");
  const auto marginal = drop_last(target);
  int code = kError;
  if (o.mode == "cptp") {
    const auto cert = conic::certify_cptp(marginal, target, o.config);
    r.results = report::certification(cert, o.verbose);
    if (o.verbose) r.results["problem"] = report::problem(conic::build_cptp_feasibility(marginal, target));
    code = status_exit(cert.status);
  } else {
    const auto ov = conic::sampling_overhead(marginal, target, o.config);
    r.results = report::overhead(ov, o.verbose);
    if (o.verbose) r.results["problem"] = report::problem(conic::build_overhead_problem(marginal, target));
    code = status_exit(ov.status);
  }
  emit(r, o);
  return code;
}

int cmd_sweep(const Options& o) {
  auto r = new_report("sweep", o);
  const auto grid = parse_grid(o.grid);
  const auto name = parse_state_name(o.family);
  if (name != StateName::kMix && name != StateName::kConvexMix) {
    throw UsageError("sweep family must be MIX or CONVEX_MIX");
  }
  r.inputs = {{"family", o.family}, {"grid", o.grid}, {"points", grid}};
  const auto result = conic::recoverability_sweep(
      [&](double p) { return make_state(*name, p); }, grid, o.config);
  r.results = report::sweep(result);
  emit(r, o);
  return kPass;
}

int demo_nonconvexity(const Options& o, report::RunReport& r) {
  const double lambda = o.lambda.value_or(0.5);
  r.inputs["lambda"] = lambda;
  const auto w4 = make_state(StateName::kW4);
  const auto rho2 = make_state(StateName::kRho2);
  const auto mid = make_state(StateName::kConvexMix, lambda);

  Json endpoints = Json::object();
  for (const auto& [name, rho] : {std::pair{"W4", w4}, std::pair{"RHO2", rho2}}) {
    const auto marginal = drop_last(rho);
    const auto cert = conic::certify_cptp(marginal, rho, o.config);
    Json e = {
        {"inclusion", report::inclusion(kernel_inclusion_check(marginal, o.tol))},
        {"cptp", report::certification(cert, o.verbose)},
    };
    endpoints[name] = e;
  }
  const auto mid_marginal = drop_last(mid);
  const auto inc = kernel_inclusion_check(mid_marginal, o.tol);
  r.results["endpoints"] = endpoints;
  r.results["midpoint"] = {{"lambda", lambda}, {"inclusion", report::inclusion(inc)}};
  if (o.verbose) r.results["midpoint"]["state"] = report::state(mid);

  const bool w4_ok = endpoints["W4"]["cptp"]["status"] != "INFEASIBLE" &&
                     endpoints["W4"]["cptp"]["status"] != "MAX_ITER";
  const bool rho2_ok = endpoints["RHO2"]["cptp"]["status"] != "INFEASIBLE" &&
                       endpoints["RHO2"]["cptp"]["status"] != "MAX_ITER";
  std::string conclusion;
  if (w4_ok && rho2_ok && !inc.verdict) {
    conclusion = "both endpoints are CPTP-recoverable and the mixture fails the "
                 "kernel-inclusion test: the recoverable set is not convex";
  } else {
    conclusion = std::string("no convexity counterexample: W4 ") +
                 (w4_ok ? "is" : "is not") + " CPTP-recoverable, RHO2 " +
                 (rho2_ok ? "is" : "is not") + " CPTP-recoverable, mixture " +
                 (inc.verdict ? "passes" : "fails") + " kernel inclusion";
  }
  r.results["conclusion"] = conclusion;
  return inc.verdict ? kPass : kFail;
}

int demo_two_qubit(const Options& o, report::RunReport& r) {
  const auto w4 = make_state(StateName::kW4);
  const auto rep = marginal_block_consistency(w4, "B", {"C", "D"});
  r.inputs["state"] = "W4";
  r.inputs["keep"] = "B";
  r.inputs["extend_to"] = Labels{"C", "D"};
  r.results["consistency"] = report::consistency(rep, o.verbose);

  const auto marginal = partial_trace(w4, {"C", "D"});
  const auto cert = conic::certify_cptp(marginal, w4, o.config);
  r.results["cptp"] = report::certification(cert, o.verbose);
  std::string conclusion;
  if (!rep.consistent) {
    conclusion = "two blocks share a traced part but differ in full: no linear map B -> BCD recovers W4";
  } else if (!cert.solution.feasible()) {
    conclusion = std::string("pairwise block test finds no linear obstruction") +
                 (rep.linear_extension_exists ? " (a linear extension exists)" : "") +
                 "; the CPTP search reports " + conic::to_string(cert.status);
  } else {
    conclusion = "a CPTP map B -> BCD recovers W4";
  }
  r.results["conclusion"] = conclusion;
  return rep.consistent ? kPass : kFail;
}

int demo_append(const Options& o, report::RunReport& r) {
  const auto ghz3 = make_state(StateName::kGhz3);
  const auto choi = make_channel_choi(ChannelName::kAppendZero);
  const auto target = tensor(ghz3, basis_state("D", 0));
  const CMatrix tr = partial_trace(choi.matrix(), choi.reg(), choi.output_factors().labels());
  const double tp_error =
      (tr - CMatrix::Identity(tr.rows(), tr.cols())).cwiseAbs().maxCoeff();
  const double residual = verify_recovery(target, ghz3, choi);
  r.inputs["state"] = "GHZ3";
  r.inputs["channel"] = "APPEND_ZERO";
  r.results["trace_preserving_error"] = tp_error;
  r.results["residual"] = residual;
  if (o.verbose) {
    r.results["choi"] = report::choi(choi);
    r.results["recovered"] = report::state(apply_choi(ghz3, choi, "C"));
  }
  const bool ok = residual <= 1e-12 && tp_error <= 1e-12;
  r.results["conclusion"] = ok ? "appending |0> to C recovers GHZ3 ⊗ |0><0|_D exactly"
                               : "append channel does not reproduce the target";
  return ok ? kPass : kFail;
}

int cmd_demo(const Options& o) {
  auto r = new_report("demo", o);
  r.inputs["name"] = o.demo;
  int code = kError;
  if (o.demo == "nonconvexity") {
    code = demo_nonconvexity(o, r);
  } else if (o.demo == "two_qubit_recovery") {
    code = demo_two_qubit(o, r);
  } else if (o.demo == "append_channel") {
    code = demo_append(o, r);
  } else {
    throw UsageError("unknown demo '" + o.demo + "'");
  }
  emit(r, o);
  return code;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--max-iter", o.config.max_iterations, "Solver iteration limit");
  app->add_option("--eps-feas", o.config.eps_feas, "Feasibility tolerance");
  app->add_option("--eps-infeasible", o.config.eps_infeasible, "Infeasibility threshold");
  app->add_flag("--pretty", o.pretty, "Human-readable output");
  app->add_flag("--verbose", o.verbose, "Include intermediate matrices and solver dumps");
}

void add_state_input(CLI::App* app, Options& o) {
  app->add_option("state", o.state_path, "State file in JSON format");
  app->add_option("--builtin", o.builtin, "GHZ4, W4, MIX, RHO2, GHZ3 or CONVEX_MIX");
  app->add_option("--p", o.p, "MIX weight of W4");
  app->add_option("--lambda", o.lambda, "CONVEX_MIX weight of W4");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Virtual quantum Markov chain analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", report::version());

  auto* state = app.add_subcommand("state", "Build a builtin state");
  state->add_option("name", o.state_name, "Builtin state name")->required();
  state->add_option("--p", o.p, "MIX weight of W4");
  state->add_option("--lambda", o.lambda, "CONVEX_MIX weight of W4");
  state->add_option("--out", o.out, "Write the state file here");
  add_common(state, o);

  auto* inclusion = app.add_subcommand("inclusion", "Kernel-inclusion test");
  add_state_input(inclusion, o);
  inclusion->add_option("--tol", o.tol, "Leak tolerance");
  add_common(inclusion, o);

  auto* certify = app.add_subcommand("certify", "Recovery certification");
  add_state_input(certify, o);
  certify->add_option("--mode", o.mode, "cptp or hptp")
      ->check(CLI::IsMember({"cptp", "hptp"}));
  add_common(certify, o);

  auto* sweep = app.add_subcommand("sweep", "Recoverability sweep over a family");
  sweep->add_option("--family", o.family, "MIX or CONVEX_MIX");
  sweep->add_option("--grid", o.grid, "start:stop:count or a comma list");
  add_common(sweep, o);

  auto* demo = app.add_subcommand("demo", "Scripted scenarios");
  demo->add_option("name", o.demo, "nonconvexity, two_qubit_recovery or append_channel")
      ->required()
      ->check(CLI::IsMember({"nonconvexity", "two_qubit_recovery", "append_channel"}));
  demo->add_option("--lambda", o.lambda, "Mixing weight for nonconvexity");
  demo->add_option("--tol", o.tol, "Leak tolerance");
  add_common(demo, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  try {
    o.config.validate();
    if (*state) return cmd_state(o);
    if (*inclusion) return cmd_inclusion(o);
    if (*certify) return cmd_certify(o);
    if (*sweep) return cmd_sweep(o);
    if (*demo) return cmd_demo(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
