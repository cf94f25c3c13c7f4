#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scfault/solver.hpp"

namespace scfault {

inline constexpr const char* kTraceHeader =
    "iter,ibr,v_mag_pu,v_ang_deg,i_mag_pu,i_ang_deg,yn_re,yn_im,in_re,in_im,residual";

// One CSV row: positive-sequence values of one IBR at one iteration, on the
// IBR's unit base.
struct TraceRow {
  int iter = 0;
  std::size_t ibr = 0;
  double v_mag = 0, v_ang = 0;
  double i_mag = 0, i_ang = 0;
  double yn_re = 0, yn_im = 0;
  double in_re = 0, in_im = 0;
  double residual = 0;
};

std::vector<TraceRow> trace_rows(const IterationTrace& trace);
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

// Throws std::runtime_error naming the offending line.
std::vector<TraceRow> read_trace_csv(std::istream& in);

// Keys: status, iterations, per_ibr [{bus, v1, i1, v2, i2}], fault, solver,
// init. Phasors are {"mag", "ang_deg"} on the unit base.
std::string summary_json(const IterationTrace& trace);

}  // namespace scfault
