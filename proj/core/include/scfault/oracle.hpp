#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "scfault/solver.hpp"

namespace scfault {

struct GridSpec {
  double mag_min = 0.0;
  double mag_max = 1.5;
  double ang_min = -180.0;
  double ang_max = 180.0;
  int n_mag = 300;
  int n_ang = 720;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Roots of g on a polar region: |g| sampled on cell centres, every local
// minimum polished by damped Newton with a central-difference 2x2 real
// Jacobian, accepted at |g| < 1e-10, deduplicated within 1e-6. Sorted by
// magnitude then angle. An empty result means no feasible operating point.
std::vector<Phasor> find_roots(const ResidualFunction& g, const GridSpec& grid = {});

struct MultistartSpec {
  int starts = 64;
  std::uint64_t seed = 20230101;
  double mag_min = 0.05;
  double mag_max = 1.5;
  unsigned threads = 0;
};

struct MultistartResult {
  std::vector<Eigen::VectorXcd> roots;  // port voltages, system base
  int converged_starts = 0;
  int total_starts = 0;
};

// Damped Newton on the stacked nodal mismatch of every IBR port from random
// starts.
MultistartResult find_roots_multistart(const FaultProblem& problem, const MultistartSpec& spec = {});

// Oracle roots as positive-sequence terminal voltages per IBR (system base).
// Uses the grid for one IBR under a balanced fault, multistart otherwise.
std::vector<std::vector<Phasor>> oracle_roots(const FaultProblem& problem);

struct Certificate {
  bool pass = false;
  bool contradiction = false;  // solver converged but the oracle found nothing
  std::size_t root = 0;
  double mag_error = 0.0;    // worst relative magnitude error over IBRs
  double angle_error = 0.0;  // worst angle error over IBRs, degrees
  std::string message;
};

// Nearest root within 2*tol relative magnitude and 2 degrees for every IBR.
Certificate certify(const IterationTrace& trace, const std::vector<std::vector<Phasor>>& roots);

}  // namespace scfault
