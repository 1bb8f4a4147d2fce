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

#include <map>
#include <vector>

#include "nextword/types.hpp"

namespace oracle {

// Slow reference counter: pads each sequence with order-1 leading pads and
// tallies every window of length 1..order that ends on a real word.
inline std::map<std::vector<nextword::WordId>, long long> brute_count_ngrams(
    const std::vector<std::vector<nextword::WordId>>& sequences, int order) {
    std::map<std::vector<nextword::WordId>, long long> counts;
    for (const auto& seq : sequences) {
        if (seq.empty()) continue;
        std::vector<nextword::WordId> padded(order - 1, nextword::kPadId);
        padded.insert(padded.end(), seq.begin(), seq.end());
        for (size_t end = order - 1; end < padded.size(); ++end) {
            for (int n = 1; n <= order; ++n) {
                std::vector<nextword::WordId> gram(padded.begin() + (end - n + 1),
                                                   padded.begin() + end + 1);
                counts[gram] += 1;
            }
        }
    }
    return counts;
}

}  // namespace oracle
