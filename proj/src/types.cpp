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

#include "nextword/types.hpp"

#include <algorithm>
#include <cstdio>

namespace nextword {

double Distribution::sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
}

int Distribution::support_size() const {
    int n = 0;
    for (double p : probs) n += (p > 0.0);
    return n;
}

void Distribution::mask_reserved_and_normalize() {
    if (probs.size() > static_cast<size_t>(kPadId)) probs[kPadId] = 0.0;
    if (probs.size() > static_cast<size_t>(kUnkId)) probs[kUnkId] = 0.0;
    double s = sum();
    if (s <= 0.0) throw EmptyDistribution("distribution has no mass after masking");
    if (s != 1.0) {
        for (double& p : probs) p /= s;
    }
}

bool RecommendationList::contains(WordId w) const {
    for (const auto& [id, score] : items)
        if (id == w) return true;
    return false;
}

RecommendationList top_k(const Distribution& dist, int k) {
    if (k < 1) throw UsageError("top_k requires K >= 1");
    std::vector<std::pair<WordId, double>> supported;
    for (WordId w = 0; w < static_cast<WordId>(dist.size()); ++w) {
        if (dist.probs[w] > 0.0) supported.emplace_back(w, dist.probs[w]);
    }
    if (supported.empty()) throw EmptyDistribution("top_k of empty distribution");
    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    size_t keep = std::min<size_t>(k, supported.size());
    std::partial_sort(supported.begin(), supported.begin() + keep, supported.end(), better);
    supported.resize(keep);
    RecommendationList out;
    out.items = std::move(supported);
    return out;
}

int full_rank(const Distribution& dist, WordId w) {
    double pw = dist.probs[w];
    int rank = 1;
    for (WordId v = kFirstRegularId; v < static_cast<WordId>(dist.size()); ++v) {
        if (v == w) continue;
        double pv = dist.probs[v];
        if (pv > pw || (pv == pw && v < w)) ++rank;
    }
    return rank;
}

void check_context(const Context& ctx, size_t vocab_size) {
    for (WordId w : ctx) {
        if (w < 0 || static_cast<size_t>(w) >= vocab_size) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "context word id %d outside vocabulary of size %zu",
                          w, vocab_size);
            throw VocabularyMismatch(buf);
        }
    }
}

}  // namespace nextword
