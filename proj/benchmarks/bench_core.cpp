#include <benchmark/benchmark.h>

#include <random>

#include "dppmle/reduction_graph.hpp"
#include "dppmle/cnf.hpp"
#include "dppmle/coloring.hpp"
#include "dppmle/expander.hpp"
#include "dppmle/kernel.hpp"
#include "dppmle/lift.hpp"
#include "dppmle/optimize.hpp"

namespace {

using namespace dppmle;

MarginalKernel random_kernel(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd q(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) q(r, c) = gauss(rng);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  q *= 0.95 / svd.singularValues()(0);
  return factor_to_kernel(GramFactor(q));
}

void BM_PointProbability(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MarginalKernel kernel = random_kernel(n, 1);
  std::vector<int> subset;
  for (int i = 0; i < n; i += 2) subset.push_back(i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(point_probability(kernel, subset));
  }
}
BENCHMARK(BM_PointProbability)->Arg(8)->Arg(32)->Arg(128);

void BM_EnumerateDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MarginalKernel kernel = random_kernel(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_distribution(kernel));
  }
}
BENCHMARK(BM_EnumerateDistribution)->Arg(8)->Arg(12);

void BM_BuildReductionGraph(benchmark::State& state) {
  const CnfFormula phi =
      parse_dimacs("p cnf 5 3\n1 2 3 0\n-1 4 5 0\n2 -3 4 0\n");
  const int k = std::max(1, phi.max_occurrences);
  const ExpanderSpec expander = build_expander(2 * k * 5, 8, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_reduction_graph(phi, expander));
  }
}
BENCHMARK(BM_BuildReductionGraph);

void BM_LiftLikelihoodFactor(benchmark::State& state) {
  const CnfFormula phi =
      parse_dimacs("p cnf 5 3\n1 2 3 0\n-1 4 5 0\n2 -3 4 0\n");
  const int k = std::max(1, phi.max_occurrences);
  const ReductionGraph graph = build_reduction_graph(phi, build_expander(2 * k * 5, 8, 7));
  const SimpleGraph simple = graph.to_simple_graph();
  const LiftedInstance lift = lift_to_hypergraph(simple);
  const auto coloring = assignment_to_coloring(
      graph, std::vector<bool>(5, true));
  const GramFactor factor = coloring_to_kernel(simple, coloring);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood(factor, lift.dataset));
  }
}
BENCHMARK(BM_LiftLikelihoodFactor);

void BM_ThreeColoringSearch(benchmark::State& state) {
  const CnfFormula phi =
      parse_dimacs("p cnf 5 3\n1 2 3 0\n-1 4 5 0\n2 -3 4 0\n");
  const int k = std::max(1, phi.max_occurrences);
  const ReductionGraph graph = build_reduction_graph(phi, build_expander(2 * k * 5, 8, 7));
  const SimpleGraph simple = graph.to_simple_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_three_coloring(simple));
  }
}
BENCHMARK(BM_ThreeColoringSearch);

void BM_OptimizerRestart(benchmark::State& state) {
  const Dataset data(3, {{0, 1}, {1, 2}, {0, 2}});
  OptimizerConfig config;
  config.restarts = 1;
  config.max_iterations = 200;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize(data, config));
  }
}
BENCHMARK(BM_OptimizerRestart);

}  // namespace

BENCHMARK_MAIN();
