#include <gtest/gtest.h>

#include <scfault/case_file.hpp>
#include <scfault/oracle.hpp>

#include "models.hpp"
#include "properties.hpp"
#include "reference.hpp"

using namespace scfault;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.n_mag = 90;
  g.n_ang = 216;
  return g;
}

}  // namespace

TEST(Oracle, ConstantCurrentClosedForm) {
  const Phasor i = polar(0.6, -75.0);
  const TheveninEquivalent th{polar(0.8, 5.0), {0.01, 0.2}};
  const ResidualFunction g(std::make_shared<testing_models::ConstantModel>(i), th);
  const auto roots = find_roots(g, small_grid());
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(std::abs(roots[0] - (th.v_th + th.z_th * i)), 0.0, 1e-10);
}

TEST(Oracle, CaseOneRootsMatchTheRadialScan) {
  const LoadedCase lc = load_case("case1");
  const FaultProblem p(lc.network, lc.fault("F1"));
  const auto roots = find_roots(ResidualFunction(p, 0));
  const auto expected = ref::single_port_roots(
      [](double r) {
        const auto [m, a] = ref::interp(ref::pv_table(), r);
        return std::pair{m * 4.0, a};
      },
      0.5, {0, 0.1625});
  ASSERT_EQ(roots.size(), expected.size());
  for (std::size_t k = 0; k < roots.size(); ++k) EXPECT_NEAR(std::abs(roots[k] - expected[k]), 0.0, 1e-9);
  // The operating point near 0.71 pu is among them.
  const bool near_071 = std::any_of(roots.begin(), roots.end(), [](Phasor r) { return std::abs(std::abs(r) - 0.71) < 0.05; });
  EXPECT_TRUE(near_071);
}

TEST(Oracle, AppendixHasARoot) {
  const LoadedCase lc = load_case("appendix");
  const FaultProblem p(lc.network, lc.faults.front());
  const auto roots = oracle_roots(p);
  ASSERT_FALSE(roots.empty());
  SolverConfig cfg;
  cfg.scheme = Scheme::solver1;
  cfg.init = InitKind::explicit_values;
  cfg.v0 = {Phasor(0.5, 0.0)};
  cfg.tol = 1e-8;
  cfg.max_iter = 500;
  const IterationTrace t = run(p, cfg);
  ASSERT_TRUE(t.converged()) << t.reason;
  EXPECT_TRUE(certify(t, roots).pass);
}

TEST(Oracle, GridRejectsDegenerateSpecs) {
  const ResidualFunction g(std::make_shared<testing_models::ConstantModel>(Phasor(1, 0)), {1.0, {0, 0.1}});
  GridSpec s;
  s.n_mag = 1;
  EXPECT_THROW(find_roots(g, s), std::invalid_argument);
  s = {};
  s.mag_max = s.mag_min;
  EXPECT_THROW(find_roots(g, s), std::invalid_argument);
}

TEST(Oracle, NoRootMeansInfeasible) {
  // A current that pushes the terminal far outside the searched region.
  const ResidualFunction g(std::make_shared<testing_models::ConstantModel>(Phasor(0, -40.0)), {1.0, {0, 0.1}});
  EXPECT_TRUE(find_roots(g, small_grid()).empty());
}

TEST(Oracle, MultistartOnThreeInverters) {
  const LoadedCase lc = load_case("multi-ibr");
  const FaultProblem p(lc.network, lc.faults.front());
  const MultistartResult m = find_roots_multistart(p);
  EXPECT_EQ(m.total_starts, 64);
  ASSERT_FALSE(m.roots.empty());
  for (const auto& r : m.roots) EXPECT_LT(p.mismatch(r, p.currents(r)).cwiseAbs().maxCoeff(), 1e-10);
  MultistartSpec bad;
  bad.starts = 0;
  EXPECT_THROW(find_roots_multistart(p, bad), std::invalid_argument);
}

TEST(Certify, AcceptsTheTightlyConvergedTangentRun) {
  const LoadedCase lc = load_case("case1");
  const FaultProblem p(lc.network, lc.fault("F1"));
  SolverConfig cfg;
  cfg.scheme = Scheme::solver1;
  cfg.tol = 1e-8;
  cfg.max_iter = 400;
  const IterationTrace t = run(p, cfg);
  ASSERT_TRUE(t.converged());
  const Certificate c = certify(t, oracle_roots(p));
  EXPECT_TRUE(c.pass) << c.message;
  EXPECT_LT(c.angle_error, 1e-4);
}

TEST(Certify, RejectsAPointAwayFromEveryRoot) {
  const LoadedCase lc = load_case("case1");
  const FaultProblem p(lc.network, lc.fault("F1"));
  SolverConfig cfg;
  cfg.scheme = Scheme::solver1;
  cfg.tol = 1e-12;
  cfg.max_iter = 400;
  IterationTrace t = run(p, cfg);
  ASSERT_TRUE(t.converged());
  t.iterations.back().ibr[0].v.pos *= polar(1.0, 5.0);
  const Certificate c = certify(t, oracle_roots(p));
  EXPECT_FALSE(c.pass);
  EXPECT_FALSE(c.contradiction);
  EXPECT_NEAR(c.angle_error, 5.0, 1e-6);
}

TEST(Certify, ConvergedWithoutRootsIsAContradiction) {
  const LoadedCase lc = load_case("case1");
  const FaultProblem p(lc.network, lc.fault("F1"));
  SolverConfig cfg;
  cfg.scheme = Scheme::solver1;
  const IterationTrace t = run(p, cfg);
  ASSERT_TRUE(t.converged());
  const Certificate c = certify(t, {});
  EXPECT_FALSE(c.pass);
  EXPECT_TRUE(c.contradiction);
}

TEST(Certify, UnconvergedRunsAreNotCertified) {
  const LoadedCase lc = load_case("case1");
  const FaultProblem p(lc.network, lc.fault("F1"));
  const IterationTrace t = run(p, SolverConfig{});
  ASSERT_EQ(t.status, Status::max_iterations);
  const auto roots = oracle_roots(p);
  EXPECT_FALSE(roots.empty());
  EXPECT_FALSE(certify(t, roots).pass);
}

TEST(OracleProperties, RootsAreRoots) {
  const auto r = props::oracle_roots_are_roots(100, 51);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(OracleProperties, GridRefinement) {
  const auto r = props::oracle_grid_refinement(100, 52);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(OracleProperties, MultistartClustering) {
  const auto r = props::multistart_clustering(100, 53);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}
