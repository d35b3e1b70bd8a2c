// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "hyprec/fem/assemble.hpp"
#include "hyprec/fem/mesh.hpp"
#include "hyprec/linalg/kernels.hpp"
#include "hyprec/util/rng.hpp"

using namespace hyprec;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

CsrMatrix laplacian(Index cells) {
    const auto mesh = fem::build_mesh(2, cells);
    return fem::assemble_diffusion(mesh, Vector(mesh.num_nodes(), 1.0));
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
    const CsrMatrix a = laplacian(state.range(0));
    const Vector x = random_vector(a.cols(), 1);
    Vector y(a.rows());
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::spmv(a.rows(), a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(), y.data());
        else
            kernels::serial::spmv(a.rows(), a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(),
                                  y.data());
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Vector x = random_vector(n, 2), y = random_vector(n, 3);
    for (auto _ : state) {
        double d = Parallel ? kernels::dot(x, y) : kernels::serial::dot(x, y);
        benchmark::DoNotOptimize(d);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Gemm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Vector a = random_vector(n * n, 4), b = random_vector(n * n, 5);
    Vector c(n * n);
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::gemm(n, n, n, a.data(), b.data(), c.data());
        else
            kernels::serial::gemm(n, n, n, a.data(), b.data(), c.data());
        benchmark::DoNotOptimize(c.data());
    }
}

template <bool Parallel>
void BM_Lu(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Vector a0 = random_vector(n * n, 6);
    for (std::size_t i = 0; i < n; ++i) a0[i * n + i] += static_cast<double>(n);
    std::vector<std::size_t> piv(n);
    for (auto _ : state) {
        state.PauseTiming();
        Vector a = a0;
        state.ResumeTiming();
        const std::size_t r = Parallel ? kernels::lu(n, a.data(), piv.data(), 0.0)
                                       : kernels::serial::lu(n, a.data(), piv.data(), 0.0);
        benchmark::DoNotOptimize(r);
    }
}

} // namespace

BENCHMARK(BM_Spmv<false>)->Arg(79)->Arg(311);
BENCHMARK(BM_Spmv<true>)->Arg(79)->Arg(311);
BENCHMARK(BM_Dot<false>)->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_Dot<true>)->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_Gemm<false>)->Arg(64)->Arg(256);
BENCHMARK(BM_Gemm<true>)->Arg(64)->Arg(256);
BENCHMARK(BM_Lu<false>)->Arg(128)->Arg(512);
BENCHMARK(BM_Lu<true>)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
