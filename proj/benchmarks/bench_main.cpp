#include <benchmark/benchmark.h>

#include "threelines/geometry.hpp"
#include "threelines/solver.hpp"
#include "threelines/specfun.hpp"
#include "threelines/surface.hpp"
#include "threelines/trinoid.hpp"

using namespace threelines;

namespace {

const geometry::TripleConfig kSymmetric{0.6, 0.6, 0.6, 1.0, 1.0, 1.0, 1};

void BM_SigmaGlobal(benchmark::State& st) {
  const auto e = specfun::make_exponents(0.6, 0.6, 0.6);
  const auto cm = specfun::connection_matrices(e);
  const cplx z(0.5, 0.85);  // the slow lens near e^{i pi/3}
  for (auto _ : st) benchmark::DoNotOptimize(specfun::sigma_global(e, cm, z));
}
BENCHMARK(BM_SigmaGlobal);

void BM_SolvePqr(benchmark::State& st) {
  const auto P = solver::prepare(kSymmetric, {0.6, 0.6, 0.6});
  for (auto _ : st) benchmark::DoNotOptimize(solver::solve_pqr(P.ends, P.eps));
}
BENCHMARK(BM_SolvePqr)->Unit(benchmark::kMillisecond);

void BM_ClassifyRoundTrip(benchmark::State& st) {
  const auto lines = geometry::lines_from_config(kSymmetric);
  for (auto _ : st) benchmark::DoNotOptimize(geometry::classify_triple(lines));
}
BENCHMARK(BM_ClassifyRoundTrip);

void BM_GenerateMesh(benchmark::State& st) {
  const auto P = solver::prepare(kSymmetric, {0.6, 0.6, 0.6});
  const auto s = solver::solve_pqr(P.ends, P.eps).front();
  const surface::WeierstrassEvaluator ev(P, solver::pqr_to_abc(s.p, s.q, s.r, P.lifted));
  surface::MeshOptions mo;
  mo.resolution = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(surface::generate_mesh(ev, mo));
}
BENCHMARK(BM_GenerateMesh)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TrinoidMesh(benchmark::State& st) {
  const auto cd = trinoid::cousin_data({0.6, 0.6, 0.6, {}});
  trinoid::TrinoidMeshOptions mo;
  mo.mesh.resolution = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(trinoid::trinoid_mesh(cd, mo));
}
BENCHMARK(BM_TrinoidMesh)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
