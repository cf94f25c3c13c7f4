#include <gtest/gtest.h>

#include <scfault/case_file.hpp>
#include <scfault/network.hpp>
#include <scfault/problem.hpp>

#include "models.hpp"
#include "properties.hpp"
#include "reference.hpp"

using namespace scfault;

namespace {

// Source at A behind j0.1 (zero sequence j0.05), line A-F j0.2 (zero j0.6).
NetworkCase radial() {
  NetworkCase c;
  c.name = "radial";
  c.buses = {"A", "F"};
  c.branches = {{"A", "F", {0, 0.2}, {0, 0.2}, {0, 0.6}}};
  c.sources = {{"A", {1.0, 0.0}, {0, 0.1}, {0, 0.1}, {0, 0.05}}};
  return c;
}

SequenceSet bolted_fault_bus(const NetworkCase& c, FaultKind kind, Impedance zf, SequenceSet* current) {
  const FaultNetwork net(c, FaultSpec::at_bus("F", kind, zf));
  const NetworkSolution s = net.unpack(net.solve(net.source_rhs()));
  if (current) *current = s.fault_current;
  return s.v[net.bus("F")];
}

}  // namespace

TEST(Admittance, SeriesBranchStamp) {
  NetworkCase c = radial();
  c.sources.clear();
  c.sources.push_back({"A", {1.0, 0.0}, {0, 1e6}, {0, 1e6}, {0, 1e6}});
  c.branches[0].z1 = {0, 0.1};
  const SequenceNetwork n = assemble_admittance(c, Sequence::positive, FaultSpec::none());
  EXPECT_NEAR(std::abs(n.y(0, 1) - Phasor(0, 10.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(n.y(1, 1) - Phasor(0, -10.0)), 0.0, 1e-12);
  EXPECT_FALSE(n.fault_bus);
}

TEST(Admittance, MidpointFaultSplitsTheBranch) {
  NetworkCase c = radial();
  FaultSpec f;
  f.name = "mid";
  f.kind = FaultKind::three_phase;
  f.location.branch = 0;
  f.location.position = 0.5;
  const SequenceNetwork n = assemble_admittance(c, Sequence::positive, f);
  ASSERT_EQ(n.buses.size(), 3u);
  ASSERT_TRUE(n.fault_bus);
  EXPECT_EQ(*n.fault_bus, 2u);
  EXPECT_NEAR(std::abs(n.y(2, 2) - 2.0 / Phasor(0, 0.1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(n.y(0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(n.y(0, 2) + 1.0 / Phasor(0, 0.1)), 0.0, 1e-12);
}

TEST(Thevenin, CaseOneSeenFromTheInverter) {
  const LoadedCase lc = load_case("case1");
  const TheveninEquivalent th = thevenin_at(lc.network, "IBR", lc.fault("F1"));
  EXPECT_NEAR(std::abs(th.z_th - Impedance(0, 0.1625)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(th.v_th - Phasor(0.5, 0.0)), 0.0, 1e-12);

  // Bus1 = 0, IBR = 1, F1 = 2, with F1 grounded.
  ref::Nodal n(3);
  n.source(0, 1.0, {0, 0.04});
  n.branch(0, 2, {0, 0.04});
  n.branch(0, 1, {0, 0.1425});
  const auto [v, z] = n.thevenin(1, {2});
  EXPECT_NEAR(std::abs(th.v_th - v), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(th.z_th - z), 0.0, 1e-12);
}

TEST(Thevenin, BoltedFaultOnTheBusItself) {
  const LoadedCase lc = load_case("case1");
  try {
    thevenin_at(lc.network, "F1", lc.fault("F1"));
    FAIL() << "expected a NetworkError";
  } catch (const NetworkError& e) {
    EXPECT_EQ(e.bus(), "F1");
  }
}

TEST(Thevenin, AppendixCaseSlopeTie) {
  const LoadedCase lc = load_case("appendix");
  const TheveninEquivalent th = thevenin_at(lc.network, lc.network.ibrs[0].bus, lc.faults.front());
  const auto* m = dynamic_cast<const VccsModel*>(lc.network.ibrs[0].model.get());
  ASSERT_NE(m, nullptr);
  const Phasor v0 = polar(0.15, 0.0);
  const Admittance y = vccs_slope_admittance(m->table(), v0) * lc.network.current_scale(0);
  // On the lowest segment the table slope cancels the network exactly.
  EXPECT_NEAR(std::abs(-y - 1.0 / th.z_th), 0.0, 1e-9);
}

TEST(NortonSolve, FirstFixedPointIterateOfCaseOne) {
  const LoadedCase lc = load_case("case1");
  const double scale = lc.network.current_scale(0);
  EXPECT_DOUBLE_EQ(scale, 4.0);
  IbrNorton n;
  n.pos.i_n = polar(1.2, -90.0) * scale;
  const NetworkSolution s = solve_with_norton(lc.network, lc.fault("F1"), {n});
  const std::size_t ibr = 1;
  ASSERT_EQ(s.buses[ibr], "IBR");
  EXPECT_NEAR(std::abs(s.v[ibr].pos - Phasor(1.28, 0.0)), 0.0, 1e-12);

  n.pos.i_n = Phasor(0.9, 0.0) * scale;
  const NetworkSolution s2 = solve_with_norton(lc.network, lc.fault("F1"), {n});
  EXPECT_NEAR(std::abs(s2.v[ibr].pos), 0.77, 5e-3);
  EXPECT_THROW(solve_with_norton(lc.network, lc.fault("F1"), {}), std::invalid_argument);
}

TEST(NortonSolve, SingularStampIsReported) {
  const LoadedCase lc = load_case("case1");
  IbrNorton n;
  n.pos.y_n = -1.0 / Impedance(0, 0.1625);
  EXPECT_THROW(solve_with_norton(lc.network, lc.fault("F1"), {n}), NetworkError);
}

TEST(FaultKinds, ThreePhaseBolted) {
  SequenceSet i;
  const SequenceSet v = bolted_fault_bus(radial(), FaultKind::three_phase, {}, &i);
  EXPECT_NEAR(std::abs(v.pos), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(i.pos - 1.0 / Impedance(0, 0.3)), 0.0, 1e-12);
}

TEST(FaultKinds, DoubleLineToGround) {
  const Impedance zf{0.02, 0.0};
  SequenceSet i;
  const SequenceSet v = bolted_fault_bus(radial(), FaultKind::llg, zf, &i);
  const ref::SeqCurrents r = ref::llg(1.0, {0, 0.3}, {0, 0.3}, {0, 0.65}, zf);
  EXPECT_NEAR(std::abs(i.pos - r.i1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(i.neg - r.i2), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(i.zero - r.i0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(v.pos - v.neg), 0.0, 1e-12);

  const SequenceSet vb = bolted_fault_bus(radial(), FaultKind::llg, {}, nullptr);
  EXPECT_NEAR(std::abs(vb.pos - vb.neg), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(vb.pos - vb.zero), 0.0, 1e-12);
}

TEST(FaultKinds, LineToLine) {
  const Impedance zf{0.05, 0.01};
  SequenceSet i;
  bolted_fault_bus(radial(), FaultKind::ll, zf, &i);
  const ref::SeqCurrents r = ref::ll(1.0, {0, 0.3}, {0, 0.3}, zf);
  EXPECT_NEAR(std::abs(i.pos - r.i1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(i.neg - r.i2), 0.0, 1e-12);

  const SequenceSet vb = bolted_fault_bus(radial(), FaultKind::ll, {}, nullptr);
  EXPECT_NEAR(std::abs(vb.pos - vb.neg), 0.0, 1e-12);
  const FaultNetwork net(radial(), FaultSpec::at_bus("F", FaultKind::ll));
  EXPECT_FALSE(net.has(Sequence::zero));
}

TEST(FaultKinds, SingleLineToGround) {
  const Impedance zf{0.1, 0.0};
  SequenceSet i;
  bolted_fault_bus(radial(), FaultKind::slg, zf, &i);
  const ref::SeqCurrents r = ref::slg(1.0, {0, 0.3}, {0, 0.3}, {0, 0.65}, zf);
  EXPECT_NEAR(std::abs(i.pos - r.i1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(i.neg - r.i2), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(i.zero - r.i0), 0.0, 1e-12);

  const SequenceSet vb = bolted_fault_bus(radial(), FaultKind::slg, {}, nullptr);
  EXPECT_NEAR(std::abs(vb.pos + vb.neg + vb.zero), 0.0, 1e-12);
}

TEST(FaultKinds, NoFaultLeavesTheSourceVoltage) {
  SequenceSet i;
  const SequenceSet v = bolted_fault_bus(radial(), FaultKind::none, {}, &i);
  EXPECT_NEAR(std::abs(v.pos - Phasor(1.0, 0.0)), 0.0, 1e-12);
}

TEST(CaseValidation, Errors) {
  NetworkCase c = radial();
  c.branches[0].to = "X";
  EXPECT_THROW(c.validate(), CaseError);

  c = radial();
  c.sources.clear();
  EXPECT_THROW(c.validate(), CaseError);

  c = radial();
  c.buses.push_back("Island");
  EXPECT_THROW(c.validate(), CaseError);

  c = radial();
  c.branches[0].z1 = {};
  EXPECT_THROW(c.validate(), CaseError);

  c = radial();
  c.ibrs.push_back({"a", "F", std::make_shared<testing_models::ConstantModel>(Phasor(1, 0)), {}});
  c.ibrs.push_back({"b", "F", std::make_shared<testing_models::ConstantModel>(Phasor(1, 0)), {}});
  EXPECT_THROW(c.validate(), CaseError);

  EXPECT_THROW(FaultNetwork(radial(), FaultSpec::at_bus("Nowhere", FaultKind::three_phase)), CaseError);
  EXPECT_THROW(FaultNetwork(radial(), FaultSpec::at_bus("F", FaultKind::slg, {-0.1, 0})), CaseError);
}

TEST(FaultKinds, ParseNames) {
  EXPECT_EQ(parse_fault_kind("3PG"), FaultKind::three_phase);
  EXPECT_EQ(parse_fault_kind("LLG"), FaultKind::llg);
  EXPECT_EQ(parse_fault_kind("LL"), FaultKind::ll);
  EXPECT_EQ(parse_fault_kind("SLG"), FaultKind::slg);
  EXPECT_FALSE(parse_fault_kind("LLLG-ish"));
}

TEST(NetworkProperties, Kcl) {
  const auto r = props::kcl(200, 31);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(NetworkProperties, TheveninEquivalence) {
  const auto r = props::thevenin_equivalence(200, 32);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(NetworkProperties, Superposition) {
  const auto r = props::superposition(200, 33);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(NetworkProperties, SequenceDecoupling) {
  const auto r = props::sequence_decoupling(200, 34);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}
