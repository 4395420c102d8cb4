#include <random>

#include <benchmark/benchmark.h>

#include "cayleyheat/cayley.hpp"
#include "cayleyheat/continuum.hpp"
#include "cayleyheat/lattice.hpp"

using namespace cayleyheat;

namespace {

GroupFunction random_function(const FiniteAbelianGroup& g) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GroupFunction f(g);
  for (std::size_t i = 0; i < g.order(); ++i) f[i] = u(rng);
  return f;
}

FiniteAbelianGroup group_of_order(std::int64_t n) { return FiniteAbelianGroup({static_cast<int>(n)}); }

void BM_Dft(benchmark::State& state) {
  const auto f = random_function(group_of_order(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dft(f));
}
BENCHMARK(BM_Dft)->RangeMultiplier(4)->Range(16, 1024);

void BM_DftProduct(benchmark::State& state) {
  const auto f = random_function(FiniteAbelianGroup::parse("Z16xZ16xZ4"));
  for (auto _ : state) benchmark::DoNotOptimize(dft(f));
}
BENCHMARK(BM_DftProduct);

void BM_ConvolveDirect(benchmark::State& state) {
  const auto f = random_function(group_of_order(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(convolve(f, f, ConvolutionMethod::direct));
}
BENCHMARK(BM_ConvolveDirect)->RangeMultiplier(4)->Range(16, 1024);

void BM_ConvolveSpectral(benchmark::State& state) {
  const auto f = random_function(group_of_order(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(convolve(f, f, ConvolutionMethod::spectral));
}
BENCHMARK(BM_ConvolveSpectral)->RangeMultiplier(4)->Range(16, 1024);

void BM_Pushforward(benchmark::State& state) {
  const auto g = FiniteAbelianGroup::parse("Z12");
  const int dim = static_cast<int>(state.range(0));
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dim, dim) * 0.7;
  b(0, dim - 1) += 0.2;
  std::vector<GroupElement> images;
  for (int i = 0; i < dim; ++i) images.push_back(g.element(static_cast<std::size_t>(1 + 2 * i)));
  const LatticeHom h(Lattice(b), g, images);
  for (auto _ : state) benchmark::DoNotOptimize(pushforward(h));
}
BENCHMARK(BM_Pushforward)->DenseRange(1, 3);

void BM_HeatRow(benchmark::State& state) {
  const auto g = FiniteAbelianGroup::parse("Z16xZ16");
  const auto cw = CayleyWeights::from_orbit_map(g, {{1, 1.0}, {16, 0.5}, {17, 2.0}});
  const auto method = state.range(0) == 0 ? HeatMethod::spectral : HeatMethod::scaling_squaring;
  for (auto _ : state) benchmark::DoNotOptimize(heat_row_cayley(cw, 3.0, method));
}
BENCHMARK(BM_HeatRow)->Arg(0)->Arg(1);

void BM_GeneralHeat(benchmark::State& state) {
  const auto g = random_heavy_tailed_graph(7, 0, 8);
  for (auto _ : state) benchmark::DoNotOptimize(heat_matrix_general(g, 1.0));
}
BENCHMARK(BM_GeneralHeat);

void BM_SphereHeat(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sphere_heat(0.3, 0.05));
}
BENCHMARK(BM_SphereHeat);

}  // namespace
BENCHMARK_MAIN();
