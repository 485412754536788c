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

#include <omp.h>

#include "exactcond/linalg.hpp"

namespace exactcond::linalg {

namespace {

// Below this many multiply-adds the thread start-up costs more than it saves.
constexpr std::size_t kParallelWork = 32 * 32 * 32;

void check_product(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ContractError("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                            " vs " + std::to_string(b.rows()) + ")");
    }
}

}  // namespace

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_product(a, b);
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t k = 0; k < a.cols(); k++) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); j++) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) {
        throw ContractError("matvec: dimension mismatch");
    }
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); i++) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); j++) {
            acc += a(i, j) * x[j];
        }
        y[i] = acc;
    }
    return y;
}

Matrix gram(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j <= i; j++) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); k++) {
                acc += a(i, k) * a(j, k);
            }
            g(i, j) = acc;
            g(j, i) = acc;
        }
    }
    return g;
}

}  // namespace serial

namespace parallel {

// Each thread owns whole rows of the result, so the accumulation order per
// entry is the same as the serial kernel and results are bit-identical.
Matrix matmul(const Matrix& a, const Matrix& b) {
    check_product(a, b);
    const std::size_t rows = a.rows();
    const std::size_t inner = a.cols();
    const std::size_t cols = b.cols();
    Matrix c(rows, cols);
    const bool wide = rows * inner * cols >= kParallelWork;

#pragma omp parallel for schedule(static) if (wide)
    for (std::size_t i = 0; i < rows; i++) {
        for (std::size_t k = 0; k < inner; k++) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < cols; j++) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) {
        throw ContractError("matvec: dimension mismatch");
    }
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    Vector y(rows);
    const bool wide = rows * cols >= kParallelWork;

#pragma omp parallel for schedule(static) if (wide)
    for (std::size_t i = 0; i < rows; i++) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; j++) {
            acc += a(i, j) * x[j];
        }
        y[i] = acc;
    }
    return y;
}

Matrix gram(const Matrix& a) {
    const std::size_t n = a.rows();
    const std::size_t inner = a.cols();
    Matrix g(n, n);
    const bool wide = n * n * inner / 2 >= kParallelWork;

    // Lower triangle rows have uneven length.
#pragma omp parallel for schedule(dynamic, 4) if (wide)
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j <= i; j++) {
            double acc = 0.0;
            for (std::size_t k = 0; k < inner; k++) {
                acc += a(i, k) * a(j, k);
            }
            g(i, j) = acc;
            g(j, i) = acc;
        }
    }
    return g;
}

}  // namespace parallel

}  // namespace exactcond::linalg
