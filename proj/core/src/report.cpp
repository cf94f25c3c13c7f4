#include "scfault/report.hpp"

#include <cstdio>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace scfault {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

nlohmann::ordered_json phasor_json(Phasor p) {
  nlohmann::ordered_json j;
  j["mag"] = std::abs(p);
  j["ang_deg"] = angle_deg(p);
  return j;
}

}  // namespace

std::vector<TraceRow> trace_rows(const IterationTrace& trace) {
  std::vector<TraceRow> rows;
  for (const Iteration& it : trace.iterations)
    for (std::size_t b = 0; b < it.ibr.size(); ++b) {
      const IbrIterate& r = it.ibr[b];
      rows.push_back({it.k, b, std::abs(r.v.pos), angle_deg(r.v.pos), std::abs(r.i.pos), angle_deg(r.i.pos),
                      r.y_n.pos.real(), r.y_n.pos.imag(), r.i_n.pos.real(), r.i_n.pos.imag(), r.residual});
    }
  return rows;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : trace_rows(trace)) {
    out << r.iter << ',' << r.ibr << ',' << fmt(r.v_mag) << ',' << fmt(r.v_ang) << ',' << fmt(r.i_mag) << ','
        << fmt(r.i_ang) << ',' << fmt(r.yn_re) << ',' << fmt(r.yn_im) << ',' << fmt(r.in_re) << ',' << fmt(r.in_im)
        << ',' << fmt(r.residual) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw std::runtime_error("trace line 1: unexpected header");
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11)
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": expected 11 fields, got " +
                               std::to_string(cells.size()));
    try {
      TraceRow r;
      r.iter = std::stoi(cells[0]);
      r.ibr = static_cast<std::size_t>(std::stoul(cells[1]));
      double* fields[] = {&r.v_mag, &r.v_ang, &r.i_mag, &r.i_ang, &r.yn_re, &r.yn_im, &r.in_re, &r.in_im, &r.residual};
      for (std::size_t f = 0; f < 9; ++f) *fields[f] = std::stod(cells[f + 2]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

std::string summary_json(const IterationTrace& trace) {
  nlohmann::ordered_json j;
  j["status"] = to_string(trace.status);
  j["iterations"] = trace.iteration_count();
  j["per_ibr"] = nlohmann::ordered_json::array();
  if (!trace.iterations.empty()) {
    const Iteration& last = trace.last();
    for (std::size_t b = 0; b < last.ibr.size(); ++b) {
      const IbrIterate& r = last.ibr[b];
      nlohmann::ordered_json e;
      e["bus"] = trace.ibr_buses[b];
      e["v1"] = phasor_json(r.v.pos);
      e["i1"] = phasor_json(r.i.pos);
      e["v2"] = phasor_json(r.v.neg);
      e["i2"] = phasor_json(r.i.neg);
      j["per_ibr"].push_back(e);
    }
  }
  j["fault"] = trace.fault;
  j["solver"] = to_string(trace.scheme);
  j["init"] = to_string(trace.init);
  return j.dump(2) + "\n";
}

}  // namespace scfault
