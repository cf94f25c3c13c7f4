#pragma once

// Randomized invariant checks shared by the unit tests and the acceptance
// runner. Each check draws `cases` random instances from `seed` and counts
// the instances that violate the invariant.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <scfault/network.hpp>

#include "reference.hpp"

namespace props {

struct Result {
  std::string name;
  int cases = 0;
  int failures = 0;
  int vacuous = 0;  // instances where the premise did not hold
  std::string first_failure;
  int last_failed = -1;

  bool ok() const { return cases > 0 && failures == 0; }
  // Counts each instance once however many of its checks fail.
  void fail(const std::string& why) {
    const int id = cases + vacuous;
    if (id == last_failed) return;
    last_failed = id;
    if (failures++ == 0) first_failure = why;
  }
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);

// A random voltage-current table: 2 to 9 rows, voltages from about 1.0 down
// to about 0.1, currents in [0.2, 1.5], relative angles in [-90, 0].
std::vector<ref::Row> random_rows(Rng& rng);

// One IBR behind a random radial network with a three-phase fault. The
// Thevenin equivalent is computed independently by plain nodal analysis.
struct SingleCase {
  scfault::NetworkCase network;
  scfault::FaultSpec fault;
  std::vector<ref::Row> rows;
  double unit_mva = 100;  // IBR base; system base is 100 MVA
  ref::cd v_th;           // system base
  ref::cd z_th;           // system base
  double current_scale() const { return unit_mva / 100.0; }
  ref::cd f(ref::cd v) const { return ref::table_current(rows, v) * current_scale(); }
  std::vector<ref::cd> roots() const;
};

// `pv` uses the fixture inverter table instead of random rows.
SingleCase random_single(Rng& rng, bool pv);

// A random meshed network of 3 to 7 buses with any fault kind.
struct MeshCase {
  scfault::NetworkCase network;
  scfault::FaultSpec fault;
};
MeshCase random_mesh(Rng& rng, int max_ibrs);

// phasor-core
Result phasor_round_trip(int cases, std::uint64_t seed);
Result base_conversion_inverse(int cases, std::uint64_t seed);
Result relative_angle_reconstruction(int cases, std::uint64_t seed);

// ibr-models
Result rotational_covariance(int cases, std::uint64_t seed);
Result interpolation_continuity(int cases, std::uint64_t seed);
// Chord admittance against the directional derivative along the voltage ray.
// With `flat_angle_only` the samples are restricted to segments whose two rows
// share a relative angle.
Result slope_consistency(int cases, std::uint64_t seed, bool flat_angle_only);
Result norton_reproduction(int cases, std::uint64_t seed);
Result kfactor_ceiling(int cases, std::uint64_t seed);

// seq-network
Result kcl(int cases, std::uint64_t seed);
Result thevenin_equivalence(int cases, std::uint64_t seed);
Result superposition(int cases, std::uint64_t seed);
Result sequence_decoupling(int cases, std::uint64_t seed);

// fault-solvers
Result affine_exactness(int cases, std::uint64_t seed);
Result fixed_point_idempotence(int cases, std::uint64_t seed);
// Converged schemes agree with each other and with an independent root within
// mag_bound relative error in |v| and 2 degrees. Runs at the given tolerance
// and iteration cap.
Result scheme_agreement(int cases, std::uint64_t seed, double tol, int max_iter, double mag_bound);
Result residual_certificate(int cases, std::uint64_t seed);
Result trace_norton_reproduction(int cases, std::uint64_t seed);

// oracle
Result oracle_roots_are_roots(int cases, std::uint64_t seed);
Result oracle_grid_refinement(int cases, std::uint64_t seed);
Result multistart_clustering(int cases, std::uint64_t seed);

// fault-cli
Result trace_round_trip(int cases, std::uint64_t seed);

// Every suite at `cases` instances, in a stable order.
std::vector<Result> all(int cases, std::uint64_t seed);

}  // namespace props
