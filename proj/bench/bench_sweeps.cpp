#include <benchmark/benchmark.h>

#include <omp.h>

#include "isonorm/isometry.hpp"

using namespace isonorm;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

const Profile& wobble3() {
  static const Profile p = Profile::cosine(3, {0.5, 0.03, -0.004});
  return p;
}

void BM_is_minkowski(benchmark::State& st) {
  const Profile p = Profile::cosine(2, {0.6, 0.1, 0.02, 0.003});
  for (auto _ : st) benchmark::DoNotOptimize(is_minkowski(p, 1 << 14, mode(st)).min_gap);
  st.SetItemsProcessed(st.iterations() * (1 << 14));
}

void BM_max_ode_residual(benchmark::State& st) {
  const Profile& f = wobble3();
  const IsometryTriple tr{f, dual_profile(PlanarNorm(f), 1024, kGlueFitTerms), ThetaMap::legendre()};
  for (auto _ : st) benchmark::DoNotOptimize(max_ode_residual(tr, 4096, mode(st)));
  st.SetItemsProcessed(st.iterations() * 4096);
}

// FD Hessians in R^5 dominate the n-dimensional checks
void BM_metric_residual(benchmark::State& st) {
  const Profile& f = wobble3();
  const FoliationModel m = FoliationModel::cartan3();
  const InducedNorm F(m, f);
  const InducedNorm G(m, f.scaled(4.0));
  const IsometryTriple tr{f, f.scaled(4.0), ThetaMap::identity()};
  const auto pts = indicatrix_samples(F, 64, 3);
  const PointMap phi = lift_to_nd(tr, m);
  for (auto _ : st) benchmark::DoNotOptimize(max_metric_residual(metric_of(F), metric_of(G), phi, pts, mode(st)));
  st.SetItemsProcessed(st.iterations() * 64);
}

}  // namespace

// arg 0 = serial reference, 1 = OpenMP sweep
BENCHMARK(BM_is_minkowski)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_max_ode_residual)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_metric_residual)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
