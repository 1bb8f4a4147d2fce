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

#include <algorithm>
#include <cmath>
#include <string>

#include "nextword/neural.hpp"

namespace testhelp {

// Central-difference check of an analytic gradient. Perturbs every parameter
// cell by +/-eps, compares (L+ - L-)/2eps against the matching gradient cell,
// and returns the worst relative error. The 1e-3 floor in the denominator
// keeps roundoff noise on near-zero cells from dominating the ratio.
struct FdReport {
    double worst = 0.0;
    std::string where;  // "tensor[index]" of the worst cell
};

template <typename P, typename LossFn>
FdReport fd_check(P params, P grad, const LossFn& loss) {
    const double eps = 1e-4;
    FdReport rep;
    auto ts = params.tensors();
    auto gs = grad.tensors();
    for (size_t t = 0; t < ts.size(); ++t) {
        for (size_t i = 0; i < ts[t].m->size(); ++i) {
            double orig = ts[t].m->a[i];
            ts[t].m->a[i] = orig + eps;
            double lp = loss(params);
            ts[t].m->a[i] = orig - eps;
            double lm = loss(params);
            ts[t].m->a[i] = orig;
            double fd = (lp - lm) / (2.0 * eps);
            double an = gs[t].m->a[i];
            double rel = std::fabs(an - fd) /
                         std::max({std::fabs(an), std::fabs(fd), 1e-3});
            if (rel > rep.worst) {
                rep.worst = rel;
                rep.where = ts[t].name + "[" + std::to_string(i) + "]";
            }
        }
    }
    return rep;
}

}  // namespace testhelp
