#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scfault/problem.hpp"

namespace scfault {

enum class Scheme { traditional, solver1, solver2 };
enum class InitKind { zero, prefault, explicit_values };

// How the per-iteration change of an IBR terminal voltage is measured.
//   phasor:    |v[k] - v[k-1]| / |v[k-1]|
//   magnitude: ||v[k]| - |v[k-1]|| / |v[k-1]|
enum class StopRule { phasor, magnitude };

const char* to_string(Scheme s);
const char* to_string(InitKind i);
const char* to_string(StopRule r);

struct SolverConfig {
  Scheme scheme = Scheme::traditional;
  InitKind init = InitKind::zero;
  // Explicit positive-sequence starts on the system base, one per IBR (a
  // single value applies to every IBR).
  std::vector<Phasor> v0;
  // Explicit second start for the secant scheme; otherwise one fixed-point
  // step from v0.
  std::vector<Phasor> v1;
  double tol = 0.05;
  int max_iter = 20;
  StopRule stop_rule = StopRule::phasor;
  double divergence_limit = 5.0;

  void validate() const;
};

enum class Status { converged, max_iterations, setup_failure, diverged };

const char* to_string(Status s);

// One IBR at one iteration, all on the IBR's unit base. i is the current that
// produced v (f of the previous iterate); residual is the nodal mismatch at v.
struct IbrIterate {
  SequenceSet v;
  SequenceSet i;
  SequenceSet y_n;
  SequenceSet i_n;
  double residual = 0.0;
};

struct Iteration {
  int k = 0;
  std::vector<IbrIterate> ibr;
};

struct IterationTrace {
  Scheme scheme = Scheme::traditional;
  InitKind init = InitKind::zero;
  std::string fault;
  double tol = 0.05;
  std::vector<std::string> ibr_buses;
  std::vector<UnitScaling> scaling;
  std::vector<Iteration> iterations;
  Status status = Status::setup_failure;
  std::string reason;

  bool converged() const { return status == Status::converged; }
  int iteration_count() const { return iterations.empty() ? 0 : iterations.back().k; }
  const Iteration& last() const { return iterations.back(); }

  // Final positive-sequence terminal voltages on the system base.
  std::vector<Phasor> final_voltages() const;
};

struct InitialPoint {
  Eigen::VectorXcd v0;        // port voltages, system base
  Eigen::VectorXcd i0;        // injections that produced v0, system base
  Eigen::VectorXcd v1;        // secant second start (empty unless solver2)
  bool v1_explicit = false;
};

InitialPoint initialize(const FaultProblem& problem, const SolverConfig& cfg);

IterationTrace run_traditional(const FaultProblem& problem, const SolverConfig& cfg);
IterationTrace run_solver1(const FaultProblem& problem, const SolverConfig& cfg);
IterationTrace run_solver2(const FaultProblem& problem, const SolverConfig& cfg);

// Dispatches on cfg.scheme. Never throws for numerical trouble; problems are
// reported through the trace status.
IterationTrace run(const FaultProblem& problem, const SolverConfig& cfg);
IterationTrace run(const NetworkCase& c, const FaultSpec& fault, const SolverConfig& cfg);

struct ConditionReport {
  bool pass = true;
  std::string reason;
};

// Start-point condition for one IBR against its Thevenin equivalent (system
// base). The tangent scheme needs f'(v0) != 1/z_th on v0's table segment; the
// secant scheme needs v0 != v1 and g(v0) != g(v1).
ConditionReport check_conditions(Scheme scheme, const IbrModel& model, Phasor v0, std::optional<Phasor> v1,
                                 const TheveninEquivalent& th, const UnitScaling& scaling = {});

// Conditions at the generated initial point, one report per IBR.
std::vector<ConditionReport> check_initial_conditions(const FaultProblem& problem, const SolverConfig& cfg);

// g(v) = f(v) - (v - v_th)/z_th for one IBR seen through its Thevenin
// equivalent; positive sequence, system base.
class ResidualFunction {
 public:
  ResidualFunction(IbrModelPtr model, TheveninEquivalent th, UnitScaling scaling = {});
  ResidualFunction(const FaultProblem& problem, std::size_t ibr);

  Phasor operator()(Phasor v) const;
  Phasor f(Phasor v) const;
  const TheveninEquivalent& thevenin() const { return th_; }

 private:
  IbrModelPtr model_;
  TheveninEquivalent th_;
  UnitScaling scaling_;
};

// Least-squares slope of log e[k+1] against log e[k] over the tail of
// decreasing errors, e[k] = max over IBRs |v[k] - v_star|. nullopt when fewer
// than 3 usable pairs exist. Throws std::invalid_argument for a trace that did
// not converge.
std::optional<double> estimate_order(const IterationTrace& trace, const std::vector<Phasor>& v_star);

}  // namespace scfault
