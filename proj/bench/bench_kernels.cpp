// Serial reference loops vs their OpenMP twins.
//
//   ./build/bench/kmpe_bench --benchmark_filter=gram
//   OMP_NUM_THREADS=8 ./build/bench/kmpe_bench

#include <random>

#include <benchmark/benchmark.h>

#include "kmpe/parallel_kernels.hpp"

namespace {

using namespace kmpe;

RowMatrix points(Eigen::Index n, Eigen::Index dim) {
    std::mt19937_64 gen(42);
    std::normal_distribution<double> normal;
    RowMatrix p(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < dim; ++d) p(i, d) = normal(gen);
    return p;
}

template <auto Fill>
void gram(benchmark::State& state) {
    const RowMatrix p = points(state.range(0), 8);
    Eigen::MatrixXd k;
    for (auto _ : state) {
        Fill(p, 0.5, k);
        benchmark::DoNotOptimize(k.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) / 2);
}

template <auto Mult>
void symv(benchmark::State& state) {
    Eigen::MatrixXd k;
    kernels::gram_fill_omp(points(state.range(0), 8), 0.5, k);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(state.range(0));
    Eigen::VectorXd y;
    for (auto _ : state) {
        Mult(k, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Dist>
void pairwise(benchmark::State& state) {
    const RowMatrix p = points(state.range(0), 8);
    for (auto _ : state) benchmark::DoNotOptimize(Dist(p).data());
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) / 2);
}

}  // namespace

BENCHMARK(gram<kernels::gram_fill_serial>)->Name("gram/serial")->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond);
BENCHMARK(gram<kernels::gram_fill_omp>)->Name("gram/omp")->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(symv<kernels::symv_serial>)->Name("symv/serial")->Arg(800)->Arg(3200)->Unit(benchmark::kMicrosecond);
BENCHMARK(symv<kernels::symv_omp>)->Name("symv/omp")->Arg(800)->Arg(3200)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(pairwise<kernels::pairwise_distances_serial>)->Name("pairwise/serial")->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond);
BENCHMARK(pairwise<kernels::pairwise_distances_omp>)->Name("pairwise/omp")->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
