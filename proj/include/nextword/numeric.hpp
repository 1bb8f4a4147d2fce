// Copyright 2026 The nextword Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nextword {

// Row-major dense matrix. Biases are stored as n x 1.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
    double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return a.size(); }
    void fill(double v) { std::fill(a.begin(), a.end(), v); }
};

// Named view over a model's parameter tensors, shared by the SGD update,
// serialization, and the finite-difference checks in the tests.
struct NamedTensor {
    std::string name;
    Matrix* m;
};

// Deterministic random source. All draws go through explicit integer
// arithmetic so results do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Modulo bias is negligible for our sizes.
    uint64_t below(uint64_t n) { return gen_() % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Softmax over logits with the reserved ids (everything below first_id)
// forced to zero probability.
std::vector<double> masked_softmax(const std::vector<double>& logits, int first_id);

// y += A x  (A: m x n, x: n, y: m)
void gemv_add(const Matrix& A, const double* x, double* y);
// y += A^T x  (A: m x n, x: m, y: n)
void gemv_t_add(const Matrix& A, const double* x, double* y);
// A += alpha * x y^T  (x: m, y: n, A: m x n)
void outer_add(Matrix& A, const double* x, const double* y, double alpha = 1.0);

double dot(const double* x, const double* y, int n);

}  // namespace nextword
