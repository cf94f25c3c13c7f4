#pragma once

#include <Eigen/Dense>
#include <vector>

#include "scfault/network.hpp"

namespace scfault {

// Conversion between the system base and one IBR's unit base.
struct UnitScaling {
  double voltage = 1.0;  // system pu -> unit pu
  double current = 1.0;  // unit pu -> system pu

  double admittance() const { return current * voltage; }  // unit -> system
};

struct Port {
  std::size_t ibr = 0;
  Sequence seq = Sequence::positive;
  std::size_t unknown = 0;  // row in the composite network
};

// A faulted network reduced to the IBR terminals. The composite matrix is
// factored once; every Norton-stamped solve then costs one small dense solve
// on the port system (compensation method). The case must outlive the problem.
//
// Port vectors hold every IBR's positive-sequence terminal first, followed by
// every negative-sequence terminal when the fault kind needs that network.
class FaultProblem {
 public:
  FaultProblem(const NetworkCase& c, const FaultSpec& fault);

  const NetworkCase& network_case() const { return *case_; }
  const FaultSpec& fault() const { return fault_; }
  const FaultNetwork& network() const { return net_; }

  std::size_t ibr_count() const { return case_->ibrs.size(); }
  std::size_t port_count() const { return ports_.size(); }
  bool has_negative() const { return net_.has(Sequence::negative); }
  const std::vector<Port>& ports() const { return ports_; }
  std::size_t port_of(std::size_t ibr, Sequence s) const;
  const UnitScaling& scaling(std::size_t ibr) const { return scaling_[ibr]; }

  // Port voltages with every IBR open.
  const Eigen::VectorXcd& open_voltage() const { return v_open_; }
  // Port transfer impedances (system base).
  const Eigen::MatrixXcd& port_impedance() const { return zp_; }

  // Positive-sequence Thevenin equivalent seen by one IBR, others open.
  TheveninEquivalent thevenin(std::size_t ibr) const;

  // Port voltages for Norton stamps i_n, y_n per port (system base).
  // Throws NetworkError when the stamped network is singular.
  Eigen::VectorXcd solve_ports(const Eigen::VectorXcd& i_n, const Eigen::VectorXcd& y_n) const;

  // Full composite solution for net currents injected at the ports.
  NetworkSolution expand(const Eigen::VectorXcd& injection) const;

  // IBR currents (system base) at port voltages (system base).
  Eigen::VectorXcd currents(const Eigen::VectorXcd& v) const;

  // Nodal mismatch i - Zp^-1 (v - v_open); zero exactly at a solution.
  Eigen::VectorXcd mismatch(const Eigen::VectorXcd& v, const Eigen::VectorXcd& i) const;

  // Terminal sequence voltages of one IBR on the system base.
  SequenceSet terminal(const Eigen::VectorXcd& ports, std::size_t ibr) const;

 private:
  const NetworkCase* case_;
  FaultSpec fault_;
  FaultNetwork net_;
  std::vector<Port> ports_;
  std::vector<UnitScaling> scaling_;
  Eigen::VectorXcd x0_;
  Eigen::MatrixXcd w_;  // composite response to unit port injections
  Eigen::VectorXcd v_open_;
  Eigen::MatrixXcd zp_;
  Eigen::MatrixXcd zp_inv_;
};

}  // namespace scfault
