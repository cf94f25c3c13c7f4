#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scfault/ibr_model.hpp"
#include "scfault/phasor.hpp"

namespace scfault {

struct Branch {
  std::string from;
  std::string to;
  Impedance z1{};
  Impedance z2{};
  Impedance z0{};
};

struct Source {
  std::string bus;
  Phasor v{1.0, 0.0};
  Impedance z1{};
  Impedance z2{};
  Impedance z0{};
};

struct IbrAttachment {
  std::string name;
  std::string bus;
  IbrModelPtr model;
  PerUnitBase base;
};

// Impedances are per unit on system_base. Each IBR model speaks its own base.
struct NetworkCase {
  std::string name;
  std::string description;
  PerUnitBase system_base{100.0, 230.0};
  std::vector<std::string> buses;
  std::vector<Branch> branches;
  std::vector<Source> sources;
  std::vector<IbrAttachment> ibrs;

  // Throws CaseError on an invalid topology.
  void validate() const;

  std::optional<std::size_t> find_bus(const std::string& name) const;

  // Factor taking an IBR's unit-base current to the system base.
  double current_scale(std::size_t ibr) const;
};

enum class FaultKind { three_phase, llg, ll, slg, none };

const char* to_string(FaultKind k);
std::optional<FaultKind> parse_fault_kind(const std::string& text);

struct FaultLocation {
  std::string bus;                    // used when branch is empty
  std::optional<std::size_t> branch;  // index into NetworkCase::branches
  double position = 0.0;              // 0 at branch.from, 1 at branch.to
};

struct FaultSpec {
  std::string name;
  FaultLocation location;
  FaultKind kind = FaultKind::none;
  Impedance z_fault{};

  static FaultSpec at_bus(std::string bus, FaultKind kind, Impedance z = {});
  static FaultSpec none();
};

class CaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NetworkError : public std::runtime_error {
 public:
  NetworkError(const std::string& what, std::string bus = {}) : std::runtime_error(what), bus_(std::move(bus)) {}
  const std::string& bus() const { return bus_; }

 private:
  std::string bus_;
};

struct TheveninEquivalent {
  Phasor v_th{};
  Impedance z_th{};
};

// Bus admittance matrix of one sequence network. A branch fault adds a bus
// at the end of `buses`. Sources appear as shunt admittances with Norton
// injections; IBRs are not stamped.
struct SequenceNetwork {
  std::vector<std::string> buses;
  Eigen::MatrixXcd y;
  Eigen::VectorXcd injection;
  std::optional<std::size_t> fault_bus;
};

SequenceNetwork assemble_admittance(const NetworkCase& c, Sequence seq, const FaultSpec& fault);

struct NetworkSolution {
  std::vector<std::string> buses;
  std::vector<SequenceSet> v;  // per bus
  SequenceSet fault_current;   // leaving the network at the fault bus
};

// Composite network: every sequence block the fault kind needs, coupled
// through the fault boundary equations. Factored once at construction.
class FaultNetwork {
 public:
  FaultNetwork(const NetworkCase& c, const FaultSpec& fault);

  const std::vector<Sequence>& sequences() const { return sequences_; }
  bool has(Sequence s) const;
  const std::vector<std::string>& buses() const { return buses_; }
  std::size_t bus(const std::string& name) const;
  std::optional<std::size_t> fault_bus() const { return fault_bus_; }

  std::size_t size() const { return static_cast<std::size_t>(a_.rows()); }
  // Row of the node voltage of `bus` in sequence `s`.
  std::size_t unknown(std::size_t bus, Sequence s) const;

  const Eigen::MatrixXcd& matrix() const { return a_; }
  const Eigen::VectorXcd& source_rhs() const { return b_; }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;

  NetworkSolution unpack(const Eigen::VectorXcd& x) const;

 private:
  std::vector<Sequence> sequences_;
  std::vector<std::string> buses_;
  std::optional<std::size_t> fault_bus_;
  std::size_t nb_ = 0;
  Eigen::MatrixXcd a_;
  Eigen::VectorXcd b_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

// Open-circuit voltage and driving-point impedance at `bus` with every IBR
// disconnected.
TheveninEquivalent thevenin_at(const NetworkCase& c, const std::string& bus, const FaultSpec& fault,
                               Sequence seq = Sequence::positive);

// Norton stamps for one IBR on the system base.
struct IbrNorton {
  NortonEquivalent pos;
  NortonEquivalent neg;
};

NetworkSolution solve_with_norton(const NetworkCase& c, const FaultSpec& fault, const std::vector<IbrNorton>& nortons);

}  // namespace scfault
