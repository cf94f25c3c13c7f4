#include <benchmark/benchmark.h>

#include <scfault/case_file.hpp>
#include <scfault/oracle.hpp>
#include <scfault/solver.hpp>

using namespace scfault;

namespace {

const LoadedCase& fixture(const char* name) {
  static const LoadedCase case1 = load_case("case1");
  static const LoadedCase multi = load_case("multi-ibr");
  static const LoadedCase llg = load_case("case1-llg");
  const std::string n = name;
  return n == "case1" ? case1 : n == "multi-ibr" ? multi : llg;
}

void run_scheme(benchmark::State& state, const char* name, Scheme scheme) {
  const LoadedCase& lc = fixture(name);
  const FaultProblem problem(lc.network, lc.faults.front());
  SolverConfig cfg;
  cfg.scheme = scheme;
  for (auto _ : state) benchmark::DoNotOptimize(run(problem, cfg));
}

void BM_Case1Traditional(benchmark::State& s) { run_scheme(s, "case1", Scheme::traditional); }
void BM_Case1Tangent(benchmark::State& s) { run_scheme(s, "case1", Scheme::solver1); }
void BM_Case1Secant(benchmark::State& s) { run_scheme(s, "case1", Scheme::solver2); }
void BM_MultiTangent(benchmark::State& s) { run_scheme(s, "multi-ibr", Scheme::solver1); }
void BM_MultiSecant(benchmark::State& s) { run_scheme(s, "multi-ibr", Scheme::solver2); }
void BM_LlgSecant(benchmark::State& s) { run_scheme(s, "case1-llg", Scheme::solver2); }

// Factoring the composite network and reducing it to the inverter ports.
void BM_ProblemSetup(benchmark::State& state) {
  const LoadedCase& lc = fixture("multi-ibr");
  for (auto _ : state) benchmark::DoNotOptimize(FaultProblem(lc.network, lc.faults.front()));
}

void BM_OracleGrid(benchmark::State& state) {
  const LoadedCase& lc = fixture("case1");
  const FaultProblem problem(lc.network, lc.faults.front());
  const ResidualFunction g(problem, 0);
  GridSpec grid;
  grid.n_mag = static_cast<int>(state.range(0));
  grid.n_ang = static_cast<int>(state.range(0)) * 12 / 5;
  grid.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(find_roots(g, grid));
}

void BM_OracleMultistart(benchmark::State& state) {
  const LoadedCase& lc = fixture("multi-ibr");
  const FaultProblem problem(lc.network, lc.faults.front());
  MultistartSpec spec;
  spec.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(find_roots_multistart(problem, spec));
}

}  // namespace

BENCHMARK(BM_Case1Traditional);
BENCHMARK(BM_Case1Tangent);
BENCHMARK(BM_Case1Secant);
BENCHMARK(BM_MultiTangent);
BENCHMARK(BM_MultiSecant);
BENCHMARK(BM_LlgSecant);
BENCHMARK(BM_ProblemSetup);
BENCHMARK(BM_OracleGrid)->Arg(60)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleMultistart)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
