// Microbenchmarks for the hot paths of one implicit time step: energy
// evaluation, gradient and Hessian assembly, and the full Newton solve.

#include <benchmark/benchmark.h>

#include "pharmonic/config.hpp"
#include "pharmonic/energy.hpp"
#include "pharmonic/field.hpp"
#include "pharmonic/flow.hpp"
#include "pharmonic/mesh.hpp"
#include "pharmonic/presets.hpp"

namespace {

struct BenchSetup {
  pharmonic::TriMesh mesh;
  pharmonic::NodalField u, u_prev, g;
  pharmonic::SolverConfig config;
  pharmonic::ConvexSplitting splitting = pharmonic::ConvexSplitting::default_quartic();

  explicit BenchSetup(double p) {
    mesh = pharmonic::build_rect_mesh(32, 32);
    u_prev = pharmonic::make_preset("smoothed-vortex", mesh, 3, 1);
    g = u_prev;
    u = pharmonic::make_preset("random-unit", mesh, 3, 7);
    config.p = p;
  }
};

void BM_TotalEnergy(benchmark::State& state) {
  const BenchSetup s(state.range(0) / 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(pharmonic::total_energy(s.mesh, s.u, s.g, s.config));
}
BENCHMARK(BM_TotalEnergy)->Arg(10)->Arg(20)->Arg(30);

void BM_GkValue(benchmark::State& state) {
  const BenchSetup s(state.range(0) / 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pharmonic::gk_value(s.mesh, s.u, s.u_prev, s.g, s.config, s.splitting));
}
BENCHMARK(BM_GkValue)->Arg(10)->Arg(20)->Arg(30);

void BM_GkGradient(benchmark::State& state) {
  const BenchSetup s(state.range(0) / 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pharmonic::gk_gradient(s.mesh, s.u, s.u_prev, s.g, s.config, s.splitting));
}
BENCHMARK(BM_GkGradient)->Arg(10)->Arg(20)->Arg(30);

void BM_GkHessian(benchmark::State& state) {
  const BenchSetup s(state.range(0) / 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pharmonic::gk_hessian(s.mesh, s.u, s.u_prev, s.g, s.config, s.splitting));
}
BENCHMARK(BM_GkHessian)->Arg(10)->Arg(20)->Arg(30);

void BM_ImplicitStep(benchmark::State& state) {
  const BenchSetup s(state.range(0) / 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pharmonic::implicit_step(s.mesh, s.u_prev, s.g, s.config, s.splitting));
}
BENCHMARK(BM_ImplicitStep)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
