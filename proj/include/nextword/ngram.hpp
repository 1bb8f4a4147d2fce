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
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nextword/corpus.hpp"
#include "nextword/types.hpp"
#include "nextword/vocab.hpp"

namespace nextword {

// Per-order absolute discounts, d[n] for n = 2..N (slots 0 and 1 unused).
struct KNDiscounts {
    std::vector<double> d;

    double at(int n) const { return d[n]; }
};

// N-gram counts in a prefix trie keyed by reversed context (newest word
// first), so truncating to the longest available context is a walk from the
// root. Each node is one context; its follower map holds the raw counts of
// context·w. After freeze() the node also carries the continuation counts
// used by the lower-order Kneser-Ney estimates.
class NGramTable {
public:
    struct Node {
        std::map<WordId, int32_t> children;   // next-older context word -> node
        std::map<WordId, int64_t> followers;  // w -> count(context·w)
        int64_t total = 0;                    // Σ follower counts
        // Continuation statistics (freeze): cont[w] = distinct non-pad left
        // extensions of context·w; cont_total = Σ cont[w].
        std::map<WordId, int64_t> cont;
        int64_t cont_total = 0;
    };

    NGramTable(int order, size_t vocab_size);

    static NGramTable count(const RawCorpus& train, const Vocabulary& vocab, int order);

    // Counts every n-gram (n = 1..order) ending at each real-word position,
    // after prepending order-1 pads. Call before freeze().
    void add_sequence(const std::vector<WordId>& words);
    // Loader path: installs one n-gram's total directly. Rejects duplicates.
    void set_gram_count(const std::vector<WordId>& gram, int64_t count);
    void freeze();
    bool frozen() const { return frozen_; }

    int order() const { return order_; }
    size_t vocab_size() const { return vocab_size_; }

    int64_t gram_count(const std::vector<WordId>& gram) const;
    // Deepest trie node matching a suffix of ctx, at most max_len words deep.
    // path_out (optional) receives nodes for suffix lengths 0..depth.
    const Node* find_context(const Context& ctx, int max_len,
                             std::vector<const Node*>* path_out = nullptr) const;
    const Node& root() const { return nodes_[0]; }

    // Number of n-grams of the given order whose count is exactly c.
    int64_t grams_with_count(int n, int64_t c) const;

    // Visits every counted n-gram in canonical order: ascending length, then
    // ascending word ids left to right.
    void for_each_gram(
        const std::function<void(const std::vector<WordId>&, int64_t)>& fn) const;

private:
    int order_;
    size_t vocab_size_;
    bool frozen_ = false;
    std::vector<Node> nodes_;  // nodes_[0] is the root (empty context)

    int32_t child_of(int32_t node, WordId w);
};

// d[n] = n1/(n1 + 2 n2) over raw n-grams of order n; 0.5 when undefined.
KNDiscounts estimate_discounts(const NGramTable& table);

// Maximum-likelihood conditional over the longest matching context of length
// >= 1 (truncated to order-1 words). Empty result when no context matches.
// matched_depth (optional) receives the context length used, 0 when none.
std::vector<double> mle_distribution_raw(const NGramTable& table, const Context& ctx,
                                         int* matched_depth = nullptr);
double prob_mle(const NGramTable& table, const Context& ctx, WordId w);

// Interpolated Kneser-Ney over all vocabulary ids, before reserved-id
// masking. The top matched level uses raw counts; lower levels use
// continuation counts; the base is the continuation unigram, floored with a
// uniform term over recommendable words unless uniform_floor is off.
std::vector<double> kn_distribution_raw(const NGramTable& table, const KNDiscounts& d,
                                        const Context& ctx, bool uniform_floor = true);
double prob_kn(const NGramTable& table, const KNDiscounts& d, const Context& ctx,
               WordId w, bool uniform_floor = true);

// Unsmoothed n-gram recommender. Reports no recommendation when no context
// of length >= 1 matches, unless unigram_fallback turns on the order-1 floor.
class MleNgramModel : public LanguageModel {
public:
    MleNgramModel(Vocabulary vocab, NGramTable table, bool unigram_fallback);

    std::string_view kind() const override { return "ngram"; }
    const Vocabulary& vocabulary() const override { return vocab_; }
    std::optional<Distribution> next_distribution(const Context& ctx) const override;

    const NGramTable& table() const { return table_; }
    bool unigram_fallback() const { return unigram_fallback_; }
    void save(const std::string& path) const;

private:
    Vocabulary vocab_;
    NGramTable table_;
    bool unigram_fallback_;
};

class KnNgramModel : public LanguageModel {
public:
    KnNgramModel(Vocabulary vocab, NGramTable table, KNDiscounts discounts);

    std::string_view kind() const override { return "ngram-kn"; }
    const Vocabulary& vocabulary() const override { return vocab_; }
    std::optional<Distribution> next_distribution(const Context& ctx) const override;

    const NGramTable& table() const { return table_; }
    const KNDiscounts& discounts() const { return discounts_; }
    void save(const std::string& path) const;

private:
    Vocabulary vocab_;
    NGramTable table_;
    KNDiscounts discounts_;
};

// Reads back either n-gram model kind from its text file.
std::unique_ptr<LanguageModel> load_ngram_model(const std::string& path,
                                                const Vocabulary& vocab);

}  // namespace nextword
