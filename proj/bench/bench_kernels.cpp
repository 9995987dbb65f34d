// Serial vs OpenMP kernels. Run with --benchmark_counters_tabular=true; the
// thread count comes from ONEDIM_ATOM_THREADS / OMP_NUM_THREADS as usual.

#include <benchmark/benchmark.h>

#include <vector>

#include "onedim/kernels.hpp"
#include "onedim/params.hpp"
#include "onedim/scenarios.hpp"

using namespace onedim;

namespace {

CsrMatrix liouvillian(int nH, int nV) {
  auto p = table_s1_preset("fig2a");
  return CsrMatrix::from(build_liouvillian(p, {nH, nV}).L);
}

template <bool Parallel>
void BM_matvec(benchmark::State& st) {
  const auto A = liouvillian(int(st.range(0)), int(st.range(1)));
  std::vector<cd> x(A.cols, cd(1.0, 0.5)), y(A.rows);
  for (auto _ : st) {
    if constexpr (Parallel)
      matvec_parallel(A, x.data(), y.data());
    else
      matvec_serial(A, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  st.counters["dim"] = A.rows;
  st.counters["nnz"] = double(A.nnz());
  st.counters["threads"] = Parallel ? max_threads() : 1;
  st.SetItemsProcessed(st.iterations() * std::int64_t(A.nnz()));
}

// Whole detuning sweep, one steady state per point, spread with parallel_for.
void BM_sweep(benchmark::State& st) {
  const int saved = max_threads();
  set_threads(st.range(0) == 0 ? 1 : saved);
  auto p = table_s1_preset("fig1d");
  set_epsilon_sq_over_2pi_GHz(p, 1e-5);
  const auto grid = ghz_grid(-1, 1, 16);
  for (auto _ : st) benchmark::DoNotOptimize(sweep_transmission_1d(p, grid, Method::Exact, {3, 3}));
  st.counters["threads"] = max_threads();
  set_threads(saved);
}

}  // namespace

BENCHMARK_TEMPLATE(BM_matvec, false)->Args({3, 3})->Args({6, 3})->Args({10, 3});
BENCHMARK_TEMPLATE(BM_matvec, true)->Args({3, 3})->Args({6, 3})->Args({10, 3});
BENCHMARK(BM_sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
