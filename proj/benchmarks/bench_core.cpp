#include <benchmark/benchmark.h>

#include "mshjb/diagnostics.hpp"
#include "mshjb/hamiltonian.hpp"
#include "mshjb/hjb.hpp"
#include "mshjb/lagrangian.hpp"
#include "mshjb/model.hpp"

using namespace mshjb;

namespace {

MultiScaleNetwork mm(long M) { return builtin_michaelis_menten(1, 1, 1, 1, M); }

void EvalH(benchmark::State& state) {
  const long M = state.range(0);
  auto net = mm(M);
  auto fss = FastStateSpace::enumerate(2, M);
  std::vector<double> x{1.3, 0.8}, p{0.7, -0.4};
  for (auto _ : state) {
    auto hv = eval_H(net, fss, x, p);
    benchmark::DoNotOptimize(hv.value);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(EvalH)->Arg(1)->Arg(3)->Arg(8)->Arg(20);

void AssembleTilted(benchmark::State& state) {
  const long M = state.range(0);
  auto net = mm(M);
  auto fss = FastStateSpace::enumerate(2, M);
  std::vector<double> x{1.3, 0.8}, p{0.7, -0.4};
  for (auto _ : state) {
    auto op = assemble_tilted(net, fss, x, p);
    benchmark::DoNotOptimize(op.V.data());
  }
}
BENCHMARK(AssembleTilted)->Arg(1)->Arg(8)->Arg(20);

void DonskerVaradhanCost(benchmark::State& state) {
  const long M = state.range(0);
  auto net = mm(M);
  auto fss = FastStateSpace::enumerate(2, M);
  std::vector<double> x{1.3, 0.8}, p{0.7, -0.4};
  ThetaMeasure theta{std::vector<double>(
      static_cast<std::size_t>(fss.size()), 1.0 / fss.size())};
  for (auto _ : state) {
    double v = eval_I(net, fss, x, p, theta);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(DonskerVaradhanCost)->Arg(1)->Arg(3)->Arg(8);

void LegendreTransform(benchmark::State& state) {
  NetworkHamiltonian H(mm(1), FastStateSpace::enumerate(2, 1));
  std::vector<double> x{1.0, 1.5}, v{0.4, 0.6};
  LegendreConfig cfg;
  cfg.p_radius = 1.5;
  cfg.scan_points_per_axis = 3;
  for (auto _ : state) {
    auto lr = legendre(H, x, v, cfg);
    benchmark::DoNotOptimize(lr.value);
  }
}
BENCHMARK(LegendreTransform);

void StationarySweepTable(benchmark::State& state) {
  NetworkHamiltonian H(mm(1), FastStateSpace::enumerate(2, 1));
  const int cells = static_cast<int>(state.range(0));
  Grid g = Grid::box({2.0, 2.0}, {cells, cells});
  StationaryConfig cfg;
  cfg.p_radius = 1.5;
  cfg.threads = 1;
  for (auto _ : state) {
    SemiLagrangianSolver solver(H, g, cfg);
    benchmark::DoNotOptimize(solver.dt());
  }
  state.SetItemsProcessed(state.iterations() * g.node_count());
}
BENCHMARK(StationarySweepTable)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void StationarySolve(benchmark::State& state) {
  NetworkHamiltonian H(mm(1), FastStateSpace::enumerate(2, 1));
  Grid g = Grid::box({2.0, 2.0}, {16, 16});
  StationaryConfig cfg;
  cfg.p_radius = 1.5;
  SemiLagrangianSolver solver(H, g, cfg);
  auto h = GridFunction::constant(g, 0.5);
  for (auto _ : state) {
    auto [f, rep] = solver.solve(h, 1.0);
    benchmark::DoNotOptimize(f.values.data());
  }
  state.SetLabel("sweeps/solve vary with dt");
}
BENCHMARK(StationarySolve)->Unit(benchmark::kMillisecond);

void DoublingScan(benchmark::State& state) {
  NetworkHamiltonian H(mm(1), FastStateSpace::enumerate(2, 1));
  const int cells = static_cast<int>(state.range(0));
  Grid g = Grid::box({2.0, 2.0}, {cells, cells});
  auto u = GridFunction::sample(g, [](std::span<const double> x) {
    return 0.1 * x[0] - 0.2 * x[1];
  });
  ContainmentSpec lq{ContainmentSpec::Kind::log_quadratic};
  std::vector<double> eps{0.1};
  std::vector<double> alpha{100.0};
  for (auto _ : state) {
    auto rep = doubling_certificate(u, u, lq, eps, alpha, H, {});
    benchmark::DoNotOptimize(rep.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * g.node_count() * g.node_count());
}
BENCHMARK(DoublingScan)->Arg(16)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
