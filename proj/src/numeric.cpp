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

#include "nextword/numeric.hpp"

#include <algorithm>

namespace nextword {

std::vector<double> masked_softmax(const std::vector<double>& logits, int first_id) {
    std::vector<double> p(logits.size(), 0.0);
    double mx = -1e300;
    for (size_t i = first_id; i < logits.size(); ++i) mx = std::max(mx, logits[i]);
    double z = 0.0;
    for (size_t i = first_id; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        z += p[i];
    }
    for (size_t i = first_id; i < logits.size(); ++i) p[i] /= z;
    return p;
}

void gemv_add(const Matrix& A, const double* x, double* y) {
    for (int r = 0; r < A.rows; ++r) {
        const double* ar = A.row(r);
        double s = 0.0;
        for (int c = 0; c < A.cols; ++c) s += ar[c] * x[c];
        y[r] += s;
    }
}

void gemv_t_add(const Matrix& A, const double* x, double* y) {
    for (int r = 0; r < A.rows; ++r) {
        const double* ar = A.row(r);
        double xr = x[r];
        if (xr == 0.0) continue;
        for (int c = 0; c < A.cols; ++c) y[c] += ar[c] * xr;
    }
}

void outer_add(Matrix& A, const double* x, const double* y, double alpha) {
    for (int r = 0; r < A.rows; ++r) {
        double* ar = A.row(r);
        double xr = alpha * x[r];
        if (xr == 0.0) continue;
        for (int c = 0; c < A.cols; ++c) ar[c] += xr * y[c];
    }
}

double dot(const double* x, const double* y, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

}  // namespace nextword
