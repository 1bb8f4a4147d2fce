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

#include "nextword/corpus.hpp"

#include <algorithm>
#include <map>

#include "nextword/io.hpp"
#include "nextword/numeric.hpp"
#include "nextword/utf8.hpp"

namespace nextword {

RawCorpus read_corpus(const std::string& path) {
    RawCorpus c;
    auto lines = read_lines(path);
    // A trailing newline produces one empty final element; drop only that.
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    c.sequences.reserve(lines.size());
    for (const auto& line : lines) c.sequences.push_back(split_ws(line));
    return c;
}

void write_corpus(const RawCorpus& corpus, const std::string& path) {
    std::string out;
    for (const auto& seq : corpus.sequences) {
        for (size_t i = 0; i < seq.size(); ++i) {
            if (i) out += ' ';
            out += seq[i];
        }
        out += '\n';
    }
    atomic_write(path, out);
}

std::vector<std::string> preprocess(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        if (tok.empty()) continue;
        if (tok == "NUM" || utf8::all_digits(tok)) {
            // The replacement notation itself must survive a second pass.
            out.push_back("NUM");
        } else if (utf8::all_ascii_letters(tok)) {
            // dropped: English words are ignored
        } else {
            out.push_back(tok);
        }
    }
    return out;
}

RawCorpus preprocess(const RawCorpus& corpus) {
    RawCorpus out;
    out.sequences.reserve(corpus.sequences.size());
    for (const auto& seq : corpus.sequences) out.sequences.push_back(preprocess(seq));
    return out;
}

SplitIndices split_corpus(const RawCorpus& corpus, uint64_t seed) {
    size_t n = corpus.size();
    if (n < 10) {
        throw TooFewSequences("need at least 10 sequences to split, got " +
                              std::to_string(n));
    }
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    size_t n_train = n * 8 / 10;
    size_t n_valid = n / 10;
    SplitIndices s;
    s.train.assign(order.begin(), order.begin() + n_train);
    s.valid.assign(order.begin() + n_train, order.begin() + n_train + n_valid);
    s.test.assign(order.begin() + n_train + n_valid, order.end());
    // Manifests list original line numbers in ascending order; the shuffle
    // only decides membership.
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.valid.begin(), s.valid.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

RawCorpus take(const RawCorpus& corpus, const std::vector<size_t>& indices) {
    RawCorpus out;
    out.sequences.reserve(indices.size());
    for (size_t i : indices) {
        if (i >= corpus.size()) throw DataError("split index out of range");
        out.sequences.push_back(corpus.sequences[i]);
    }
    return out;
}

void write_split_manifest(const std::vector<size_t>& indices, const std::string& path) {
    std::string out;
    for (size_t i : indices) {
        out += std::to_string(i);
        out += '\n';
    }
    atomic_write(path, out);
}

std::vector<size_t> read_split_manifest(const std::string& path) {
    std::vector<size_t> out;
    for (const auto& line : read_lines(path)) {
        if (line.empty()) continue;
        int64_t v = parse_int(line);
        if (v < 0) throw DataError("negative split index in " + path);
        out.push_back(static_cast<size_t>(v));
    }
    return out;
}

bool EvalQuery::is_truth(WordId w) const { return truth_count(w) > 0; }

int EvalQuery::truth_count(WordId w) const {
    for (const auto& [id, count] : truths) {
        if (id == w) return count;
    }
    return 0;
}

std::vector<EvalQuery> make_queries(const RawCorpus& corpus, const Vocabulary& vocab) {
    // Key on the exact context token list; queries come out in first-seen order.
    std::map<std::vector<std::string>, size_t> index;
    std::vector<std::vector<std::string>> key_of;
    std::vector<std::map<WordId, int>> truth_of;

    for (const auto& seq : corpus.sequences) {
        if (seq.size() < 2) continue;
        for (size_t k = 1; k < seq.size(); ++k) {
            std::vector<std::string> ctx(seq.begin(), seq.begin() + k);
            WordId truth = vocab.id_of(seq[k]);
            if (truth < kFirstRegularId) continue;  // no ground truth for OOV words
            auto [it, fresh] = index.emplace(std::move(ctx), key_of.size());
            if (fresh) {
                key_of.push_back(it->first);
                truth_of.emplace_back();
            }
            truth_of[it->second][truth] += 1;
        }
    }

    std::vector<EvalQuery> queries;
    queries.reserve(key_of.size());
    for (size_t i = 0; i < key_of.size(); ++i) {
        if (truth_of[i].empty()) continue;
        EvalQuery q;
        q.context_tokens = key_of[i];
        q.context = vocab.encode(q.context_tokens);
        for (const auto& [id, count] : truth_of[i]) {
            q.truths.emplace_back(id, count);
            q.total += count;
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

void write_queries(const std::vector<EvalQuery>& queries, const std::string& path) {
    std::string out;
    for (const auto& q : queries) {
        for (size_t i = 0; i < q.context_tokens.size(); ++i) {
            if (i) out += ' ';
            out += q.context_tokens[i];
        }
        out += '\t';
        bool first = true;
        for (const auto& [id, count] : q.truths) {
            if (!first) out += ' ';
            first = false;
            out += std::to_string(id);
            out += ':';
            out += std::to_string(count);
        }
        out += '\n';
    }
    atomic_write(path, out);
}

std::vector<EvalQuery> read_queries(const std::string& path, const Vocabulary& vocab) {
    std::vector<EvalQuery> queries;
    for (const auto& line : read_lines(path)) {
        if (line.empty()) continue;
        auto cols = split_tab(line);
        if (cols.size() != 2) throw DataError("bad query line: '" + line + "'");
        EvalQuery q;
        q.context_tokens = split_ws(cols[0]);
        if (q.context_tokens.empty()) throw DataError("query with empty context: " + path);
        q.context = vocab.encode(q.context_tokens);
        for (const auto& item : split_ws(cols[1])) {
            size_t colon = item.rfind(':');
            if (colon == std::string::npos) throw DataError("bad truth item: '" + item + "'");
            int64_t id = parse_int(item.substr(0, colon));
            int64_t count = parse_int(item.substr(colon + 1));
            if (id < kFirstRegularId || static_cast<size_t>(id) >= vocab.size() || count < 1) {
                throw DataError("truth out of range: '" + item + "'");
            }
            q.truths.emplace_back(static_cast<WordId>(id), static_cast<int>(count));
            q.total += static_cast<int>(count);
        }
        std::sort(q.truths.begin(), q.truths.end());
        queries.push_back(std::move(q));
    }
    return queries;
}

}  // namespace nextword
