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

#include "nextword/vocab.hpp"

#include <algorithm>

#include "nextword/io.hpp"

namespace nextword {

static const std::string kPadSurface = "<s>";
static const std::string kUnkSurface = "<unk>";

Vocabulary::Vocabulary() {
    words_ = {kPadSurface, kUnkSurface};
    freqs_ = {0, 0};
    reindex();
}

void Vocabulary::reindex() {
    index_.clear();
    for (size_t i = 0; i < words_.size(); ++i) {
        index_.emplace(words_[i], static_cast<WordId>(i));
    }
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sequences,
                             int min_count, int max_size) {
    std::map<std::string, int64_t> counts;
    int64_t total = 0;
    for (const auto& seq : sequences) {
        for (const auto& tok : seq) {
            counts[tok] += 1;
            ++total;
        }
    }
    if (total == 0) throw EmptyCorpus("no tokens in training corpus");
    // Reserved surfaces never become regular entries even if present in data.
    counts.erase(kPadSurface);
    counts.erase(kUnkSurface);

    std::vector<std::pair<std::string, int64_t>> order(counts.begin(), counts.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    int64_t dropped = 0;
    for (const auto& [word, count] : order) {
        bool keep = count >= min_count &&
                    (max_size <= 0 ||
                     static_cast<int>(v.words_.size()) - kFirstRegularId < max_size);
        if (keep) {
            v.words_.push_back(word);
            v.freqs_.push_back(count);
        } else {
            dropped += count;
        }
    }
    v.freqs_[kUnkId] = dropped;
    v.reindex();
    return v;
}

WordId Vocabulary::id_of(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::word_of(WordId id) const {
    if (id < 0 || static_cast<size_t>(id) >= words_.size()) {
        throw VocabularyMismatch("word id out of range: " + std::to_string(id));
    }
    return words_[id];
}

bool Vocabulary::contains(const std::string& word) const {
    return index_.count(word) > 0;
}

std::vector<WordId> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<WordId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id_of(t));
    return ids;
}

void Vocabulary::save(const std::string& path) const {
    std::string out;
    for (size_t i = 0; i < words_.size(); ++i) {
        out += std::to_string(i);
        out += '\t';
        out += words_[i];
        out += '\t';
        out += std::to_string(freqs_[i]);
        out += '\n';
    }
    atomic_write(path, out);
}

Vocabulary Vocabulary::load(const std::string& path) {
    Vocabulary v;
    v.words_.clear();
    v.freqs_.clear();
    auto lines = read_lines(path);
    for (const auto& line : lines) {
        if (line.empty()) continue;
        auto cols = split_tab(line);
        if (cols.size() != 3) throw DataError("bad vocabulary line: '" + line + "'");
        int64_t id = parse_int(cols[0]);
        if (id != static_cast<int64_t>(v.words_.size())) {
            throw DataError("vocabulary ids must be dense from 0: " + path);
        }
        v.words_.push_back(cols[1]);
        v.freqs_.push_back(parse_int(cols[2]));
    }
    if (v.words_.size() < 2 || v.words_[kPadId] != kPadSurface ||
        v.words_[kUnkId] != kUnkSurface) {
        throw DataError("vocabulary missing reserved entries: " + path);
    }
    v.reindex();
    if (v.index_.size() != v.words_.size()) {
        throw DataError("vocabulary has duplicate words: " + path);
    }
    return v;
}

}  // namespace nextword
