/*
    Copyright 2026 The exactcond Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

// Serial reference kernels vs their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "exactcond/linalg.hpp"

using exactcond::linalg::Matrix;
using exactcond::linalg::Vector;
namespace serial = exactcond::linalg::serial;
namespace parallel = exactcond::linalg::parallel;

static Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(rows, cols);
    for (double& x : m.values()) {
        x = dist(rng);
    }
    return m;
}

static void BM_MatmulSerial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 1);
    const Matrix b = random_matrix(n, n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::matmul(a, b));
    }
    state.SetComplexityN(state.range(0));
}

static void BM_MatmulParallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 1);
    const Matrix b = random_matrix(n, n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parallel::matmul(a, b));
    }
    state.SetComplexityN(state.range(0));
}

static void BM_GramSerial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::gram(a));
    }
}

static void BM_GramParallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parallel::gram(a));
    }
}

static void BM_MatvecSerial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 4);
    const Vector x(n, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::matvec(a, x));
    }
}

static void BM_MatvecParallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 4);
    const Vector x(n, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parallel::matvec(a, x));
    }
}

BENCHMARK(BM_MatmulSerial)->RangeMultiplier(2)->Range(16, 256)->Complexity();
BENCHMARK(BM_MatmulParallel)->RangeMultiplier(2)->Range(16, 256)->Complexity();
BENCHMARK(BM_GramSerial)->RangeMultiplier(2)->Range(16, 256);
BENCHMARK(BM_GramParallel)->RangeMultiplier(2)->Range(16, 256);
BENCHMARK(BM_MatvecSerial)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_MatvecParallel)->RangeMultiplier(4)->Range(64, 1024);

BENCHMARK_MAIN();
