#include <benchmark/benchmark.h>

#include <vector>

#include "finom/dense.hpp"
#include "finom/kernel1d.hpp"
#include "finom/kernel2d.hpp"

namespace {

void BM_FastApply1D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const finom::KernelOperator1D op(finom::random_sorted_nodes(n, 1), finom::random_sorted_nodes(n, 2),
                                   0.01);
  const finom::Measure mass = finom::random_measure(n, 3);
  const std::vector<double> psi(mass.weights().begin(), mass.weights().end());
  std::vector<double> out(n);
  for (auto _ : state) {
    op.apply_unchecked(psi, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FastApply1D)->RangeMultiplier(4)->Range(256, 1 << 16)->Complexity();

void BM_DenseApply1D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const finom::DenseKernel k =
      finom::dense_kernel(finom::random_sorted_nodes(n, 1), finom::random_sorted_nodes(n, 2), 0.01);
  const finom::Measure mass = finom::random_measure(n, 3);
  const std::vector<double> psi(mass.weights().begin(), mass.weights().end());
  std::vector<double> out(n);
  for (auto _ : state) {
    finom::dense_matvec(k.entries, psi, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DenseApply1D)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_FastApply2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const finom::Problem2D p = finom::generate_problem_2d(n, n, 1);
  const finom::KernelOperator2D op(p.source, p.target, 0.01);
  const auto w = p.v.weights();
  const std::vector<double> psi(w.begin(), w.end());
  std::vector<double> out(op.rows());
  for (auto _ : state) {
    op.apply_unchecked(psi, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_FastApply2D)->RangeMultiplier(2)->Range(16, 256)->Complexity();

}  // namespace

BENCHMARK_MAIN();
