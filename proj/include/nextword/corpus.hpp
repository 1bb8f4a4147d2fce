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

#include <string>
#include <vector>

#include "nextword/types.hpp"
#include "nextword/vocab.hpp"

namespace nextword {

// One user-typed word sequence per line, tokens separated by spaces. The
// user's own segmentation is kept as-is; we never re-segment.
struct RawCorpus {
    std::vector<std::vector<std::string>> sequences;

    size_t size() const { return sequences.size(); }
};

RawCorpus read_corpus(const std::string& path);
void write_corpus(const RawCorpus& corpus, const std::string& path);

// Digit-only tokens (ASCII or full-width) collapse to the literal "NUM";
// tokens made only of ASCII letters are dropped; everything else passes
// through untouched. Idempotent.
std::vector<std::string> preprocess(const std::vector<std::string>& tokens);
RawCorpus preprocess(const RawCorpus& corpus);

// Seeded 80/10/10 split by sequence. Sizes: floor(0.8n), floor(0.1n), rest.
struct SplitIndices {
    std::vector<size_t> train, valid, test;
};
SplitIndices split_corpus(const RawCorpus& corpus, uint64_t seed);
RawCorpus take(const RawCorpus& corpus, const std::vector<size_t>& indices);

void write_split_manifest(const std::vector<size_t>& indices, const std::string& path);
std::vector<size_t> read_split_manifest(const std::string& path);

// Aggregated evaluation unit: one distinct typing context plus the multiset
// of words that actually followed it across the corpus.
struct EvalQuery {
    std::vector<std::string> context_tokens;  // kept for context-length bucketing
    Context context;                          // id-mapped, UNK allowed
    std::vector<std::pair<WordId, int>> truths;  // ascending id, multiplicity >= 1
    int total = 0;                               // U: sum of multiplicities

    bool is_truth(WordId w) const;
    int truth_count(WordId w) const;
};

// Builds one query per distinct context token list (first-seen order). Each
// length-n sequence contributes n-1 (prefix, next word) pairs. Ground-truth
// words that fall outside the vocabulary are dropped; queries left with no
// truths are dropped too.
std::vector<EvalQuery> make_queries(const RawCorpus& corpus, const Vocabulary& vocab);

void write_queries(const std::vector<EvalQuery>& queries, const std::string& path);
std::vector<EvalQuery> read_queries(const std::string& path, const Vocabulary& vocab);

}  // namespace nextword
