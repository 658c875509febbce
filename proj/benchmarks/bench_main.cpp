#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "spfem/fem.hpp"
#include "spfem/maximal.hpp"
#include "spfem/quadrature.hpp"
#include "spfem/weights.hpp"

using namespace spfem;

namespace {

MeshPtr square(int cells) {
  return std::make_shared<const Mesh>(triangulate_structured(ConvexPolygon::unit_square(), std::sqrt(2.0) / cells));
}

void BM_AssembleStiffness(benchmark::State& state) {
  const auto mesh = square(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(mesh));
  state.counters["triangles"] = static_cast<double>(mesh->num_triangles());
}
BENCHMARK(BM_AssembleStiffness)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ConjugateGradient(benchmark::State& state) {
  const auto sys = assemble_stiffness(square(static_cast<int>(state.range(0))));
  const auto rhs = assemble_rhs(*sys.dofs, PointMass{{0.5, 0.5}, 1.0});
  int iterations = 0;
  for (auto _ : state) {
    const auto r = conjugate_gradient(sys.reduced, rhs);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["unknowns"] = static_cast<double>(sys.reduced.rows);
  state.counters["cg_iterations"] = iterations;
}
BENCHMARK(BM_ConjugateGradient)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_HlMaximal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto f = GridSampling::sample({{0, 0}, {1, 1}}, n, n, [](Point2 x) { return std::sin(7 * x.x) * x.y; });
  for (auto _ : state) benchmark::DoNotOptimize(hl_maximal(f));
}
BENCHMARK(BM_HlMaximal)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GradedSeminorm(benchmark::State& state) {
  const auto mesh = square(32);
  const auto u = interpolate(mesh, 1, [](Point2 x) { return std::sin(std::numbers::pi * x.x) * x.y; });
  const auto features = FeatureSet::point({0.5, 0.5});
  const auto scheme = GradedScheme::graded(features, static_cast<int>(state.range(0)));
  const PowerWeight w(-1.0, features);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_seminorm(u, w, 2.0, scheme));
}
BENCHMARK(BM_GradedSeminorm)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ApEstimate(benchmark::State& state) {
  const PowerWeight w(1.0, FeatureSet::point({0, 0}));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_ap_constant(w, 2.0, square_box({0, 0}, 1.0), static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ApEstimate)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
