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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nextword {

using WordId = int32_t;

// Reserved vocabulary slots. PAD marks sentence start and context padding,
// UNK absorbs out-of-vocabulary words. Both are masked out of every
// distribution before ranking; NUM is an ordinary, recommendable word.
inline constexpr WordId kPadId = 0;
inline constexpr WordId kUnkId = 1;
inline constexpr WordId kFirstRegularId = 2;

class Vocabulary;

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes; library code throws.

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VocabularyMismatch : DataError {
    using DataError::DataError;
};
struct EmptyDistribution : DataError {
    using DataError::DataError;
};
struct EmptyCorpus : DataError {
    using DataError::DataError;
};
struct TooFewSequences : DataError {
    using DataError::DataError;
};
struct EmptyValidationSet : DataError {
    using DataError::DataError;
};
struct NoUsableQueries : DataError {
    using DataError::DataError;
};
struct NoComparableQueries : DataError {
    using DataError::DataError;
};
struct WeightOutOfRange : UsageError {
    using UsageError::UsageError;
};
struct DivergenceDetected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------

// The user's typing history, oldest word first.
using Context = std::vector<WordId>;

// Dense next-word distribution over the whole vocabulary id range.
// Models guarantee probs[kPadId] == probs[kUnkId] == 0 and a total of 1
// over the remaining (recommendable) words.
struct Distribution {
    std::vector<double> probs;

    Distribution() = default;
    explicit Distribution(size_t vocab_size) : probs(vocab_size, 0.0) {}

    size_t size() const { return probs.size(); }
    double sum() const;
    int support_size() const;

    // Zeroes the reserved slots and rescales the rest to sum to 1.
    // Throws EmptyDistribution if nothing is left.
    void mask_reserved_and_normalize();
};

// Ranked (word, score) list. Scores are non-increasing, ties broken by
// ascending word id, no duplicates, length <= K.
struct RecommendationList {
    std::vector<std::pair<WordId, double>> items;

    size_t size() const { return items.size(); }
    bool contains(WordId w) const;
};

// The K highest-probability words; zero-probability words never appear,
// so a distribution with fewer than K supported words yields a short list.
RecommendationList top_k(const Distribution& dist, int k);

// Rank of w in the full deterministic ordering of recommendable words
// (probability descending, word id ascending on ties). 1-based.
int full_rank(const Distribution& dist, WordId w);

// ---------------------------------------------------------------------------

// Shared contract of every model family. Implementations are immutable
// after construction; next_distribution is a pure read and safe to call
// concurrently. An empty optional is the explicit no-recommendation
// outcome, not an error.
class LanguageModel {
public:
    virtual ~LanguageModel() = default;

    virtual std::string_view kind() const = 0;
    virtual const Vocabulary& vocabulary() const = 0;
    virtual std::optional<Distribution> next_distribution(const Context& ctx) const = 0;
};

// Throws VocabularyMismatch if any id is outside [0, vocab_size).
void check_context(const Context& ctx, size_t vocab_size);

}  // namespace nextword
