// Microbenchmarks for the hot paths: the sparse momentum-block matvec that
// dominates every eigensolve, the Lanczos ground-state solve built on it,
// and the real-space oracle matvec for comparison.

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "wchain/hamiltonian.hpp"
#include "wchain/hilbert.hpp"
#include "wchain/model.hpp"
#include "wchain/solver.hpp"

namespace {

wchain::ModelParams params_for(int n_sites, int cutoff) {
  wchain::ModelParams p;
  p.t_e = 1.0;
  p.hbar_omega_b = 1.0;
  p.g = 0.6;
  p.n_sites = n_sites;
  p.boson_cutoff = cutoff;
  return p;
}

void BM_KBlockApply(benchmark::State& state) {
  const auto p =
      params_for(static_cast<int>(state.range(0)),
                 static_cast<int>(state.range(1)));
  const auto op =
      wchain::apply_k_block_operator(p, wchain::Quasimomentum::of(1, p.n_sites));
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(op.dim()).normalized();
  Eigen::VectorXcd w(op.dim());
  for (auto _ : state) {
    op.apply(v, w);
    benchmark::DoNotOptimize(w.data());
    std::swap(v, w);
  }
  state.SetItemsProcessed(state.iterations() * op.dim());
}

void BM_RealSpaceApply(benchmark::State& state) {
  const auto p =
      params_for(static_cast<int>(state.range(0)),
                 static_cast<int>(state.range(1)));
  const auto op = wchain::build_real_space(p);
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(op.dim()).normalized();
  Eigen::VectorXcd w(op.dim());
  for (auto _ : state) {
    op.apply(v, w);
    benchmark::DoNotOptimize(w.data());
    std::swap(v, w);
  }
  state.SetItemsProcessed(state.iterations() * op.dim());
}

void BM_LanczosGround(benchmark::State& state) {
  const auto p =
      params_for(static_cast<int>(state.range(0)),
                 static_cast<int>(state.range(1)));
  const auto op =
      wchain::apply_k_block_operator(p, wchain::Quasimomentum::of(0, p.n_sites));
  wchain::LanczosConfig cfg;
  cfg.n_eigenpairs = 1;
  cfg.tolerance = 1e-10;
  for (auto _ : state) {
    const auto r = wchain::lanczos_extremal(op, cfg);
    benchmark::DoNotOptimize(r.eigenvalues.data());
  }
}

}  // namespace

BENCHMARK(BM_KBlockApply)->Args({8, 4})->Args({8, 6})->Args({12, 4});
BENCHMARK(BM_RealSpaceApply)->Args({8, 4})->Args({8, 6});
BENCHMARK(BM_LanczosGround)->Args({8, 4})->Args({8, 6});

BENCHMARK_MAIN();
