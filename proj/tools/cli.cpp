#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "scfault/case_file.hpp"
#include "scfault/oracle.hpp"
#include "scfault/report.hpp"
#include "scfault/solver.hpp"

namespace scfault {

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitSetup = 3;

struct RunOptions {
  std::string case_name;
  std::string fault;
  std::string solver = "traditional";
  std::string init = "zero";
  std::vector<std::string> v0;
  std::vector<std::string> v1;
  double tol = 0.05;
  int max_iter = 20;
  std::string stop_rule = "phasor";
  std::string trace_out;
  std::string json_summary;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "0.15" or "0.15@30" (magnitude in pu, angle in degrees).
Phasor parse_start(const std::string& text) {
  const auto at = text.find('@');
  try {
    std::size_t used = 0;
    const double mag = std::stod(text.substr(0, at), &used);
    if (used != text.substr(0, at).size()) throw std::invalid_argument(text);
    double ang = 0.0;
    if (at != std::string::npos) {
      const std::string a = text.substr(at + 1);
      ang = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(text);
    }
    return polar(mag, ang);
  } catch (const std::exception&) {
    throw InputError("bad start value '" + text + "' (expected MAG or MAG@ANGLE_DEG)");
  }
}

SolverConfig make_config(const RunOptions& o) {
  static const std::map<std::string, Scheme> schemes{
      {"traditional", Scheme::traditional}, {"nr", Scheme::solver1}, {"secant", Scheme::solver2}};
  SolverConfig cfg;
  cfg.scheme = schemes.at(o.solver);
  cfg.init = o.init == "powerflow" ? InitKind::prefault : InitKind::zero;
  for (const std::string& s : o.v0) cfg.v0.push_back(parse_start(s));
  for (const std::string& s : o.v1) cfg.v1.push_back(parse_start(s));
  if (!cfg.v0.empty()) cfg.init = InitKind::explicit_values;
  if (!cfg.v1.empty() && cfg.scheme != Scheme::solver2) throw InputError("--v1 only applies to --solver secant");
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.stop_rule = o.stop_rule == "magnitude" ? StopRule::magnitude : StopRule::phasor;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return cfg;
}

std::string phasor_text(Phasor p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f<%.2f", std::abs(p), angle_deg(p));
  return buf;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool full) {
  cmd->add_option("case", o.case_name, "Case file or embedded fixture name")->required();
  cmd->add_option("fault", o.fault, "Fault name defined in the case")->required();
  cmd->add_option("--solver", o.solver, "Iteration scheme")
      ->check(CLI::IsMember({"traditional", "nr", "secant"}));
  cmd->add_option("--init", o.init, "Initial point")->check(CLI::IsMember({"zero", "powerflow"}));
  cmd->add_option("--v0", o.v0, "Explicit start per IBR, MAG[@ANGLE_DEG] on the system base");
  cmd->add_option("--v1", o.v1, "Explicit second start for the secant scheme");
  if (!full) return;
  cmd->add_option("--tol", o.tol, "Relative voltage-change tolerance");
  cmd->add_option("--max-iter", o.max_iter, "Iteration limit");
  cmd->add_option("--stop-rule", o.stop_rule, "Change measure for the stopping test")
      ->check(CLI::IsMember({"phasor", "magnitude"}));
  cmd->add_option("--trace-out", o.trace_out, "Write the iteration trace as CSV");
  cmd->add_option("--json-summary", o.json_summary, "Write the run summary as JSON");
}

int do_run(const RunOptions& o, std::ostream& out) {
  const LoadedCase loaded = load_case(o.case_name);
  const FaultSpec& fault = loaded.fault(o.fault);
  const SolverConfig cfg = make_config(o);
  const IterationTrace trace = run(loaded.network, fault, cfg);

  if (!o.trace_out.empty()) {
    std::ofstream f(o.trace_out);
    if (!f) throw InputError("cannot write " + o.trace_out);
    write_trace_csv(f, trace);
  }
  if (!o.json_summary.empty()) {
    std::ofstream f(o.json_summary);
    if (!f) throw InputError("cannot write " + o.json_summary);
    f << summary_json(trace);
  }

  out << "case " << loaded.network.name << ", fault " << fault.name << " (" << to_string(fault.kind) << "), solver "
      << to_string(trace.scheme) << ", init " << to_string(trace.init) << "\n";
  out << "status: " << to_string(trace.status) << " after " << trace.iteration_count() << " iteration(s)";
  if (!trace.reason.empty() && !trace.converged()) out << " - " << trace.reason;
  out << "\n";
  if (!trace.iterations.empty())
    for (std::size_t b = 0; b < trace.last().ibr.size(); ++b) {
      const IbrIterate& r = trace.last().ibr[b];
      out << "  " << trace.ibr_buses[b] << ": V1 = " << phasor_text(r.v.pos) << "  I1 = " << phasor_text(r.i.pos);
      if (r.v.neg != Phasor{} || r.i.neg != Phasor{})
        out << "  V2 = " << phasor_text(r.v.neg) << "  I2 = " << phasor_text(r.i.neg);
      out << "  (unit base)\n";
    }

  switch (trace.status) {
    case Status::converged: return kExitConverged;
    case Status::max_iterations:
    case Status::diverged: return kExitNotConverged;
    case Status::setup_failure: return kExitSetup;
  }
  return kExitSetup;
}

int do_check(const RunOptions& o, std::ostream& out) {
  const LoadedCase loaded = load_case(o.case_name);
  const FaultSpec& fault = loaded.fault(o.fault);
  const SolverConfig cfg = make_config(o);

  FaultProblem problem(loaded.network, fault);
  const auto roots = oracle_roots(problem);
  if (roots.empty()) {
    out << "Condition 1: FAIL (no operating point found by the oracle)\n";
  } else {
    out << "Condition 1: PASS (" << roots.size() << " operating point(s)";
    for (const auto& r : roots) {
      out << ";";
      for (const Phasor& v : r) out << " " << phasor_text(v);
    }
    out << ")\n";
  }

  const auto reports = check_initial_conditions(problem, cfg);
  bool pass = true;
  std::string detail;
  for (std::size_t b = 0; b < reports.size(); ++b) {
    pass = pass && reports[b].pass;
    detail += (detail.empty() ? "" : "; ") + loaded.network.ibrs[b].bus + ": " + reports[b].reason;
  }
  out << "Condition 2: " << (pass ? "PASS" : "FAIL") << " (" << to_string(cfg.scheme) << ", " << detail << ")\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Short-circuit fault solver for networks with inverter-based resources"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Solve one fault and report the iteration");
  add_run_options(run_cmd, run_opts, true);

  RunOptions check_opts;
  CLI::App* check_cmd = app.add_subcommand("check", "Report solvability and start-point conditions");
  add_run_options(check_cmd, check_opts, false);

  CLI::App* list_cmd = app.add_subcommand("list-cases", "List embedded fixtures");

  std::string show_name;
  CLI::App* show_cmd = app.add_subcommand("show-case", "Print an embedded fixture");
  show_cmd->add_option("name", show_name, "Fixture name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kExitInput;
  }

  try {
    if (*run_cmd) return do_run(run_opts, out);
    if (*check_cmd) return do_check(check_opts, out);
    if (*list_cmd) {
      for (const std::string& n : fixture_names()) out << n << "\n";
      return 0;
    }
    if (*show_cmd) {
      const auto text = fixture_text(show_name);
      if (!text) throw InputError("no embedded fixture named '" + show_name + "'");
      out << *text;
      return 0;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CaseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NetworkError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSetup;
  }
  return kExitInput;
}

}  // namespace scfault
