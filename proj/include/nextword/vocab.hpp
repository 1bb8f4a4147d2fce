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
#include <map>
#include <string>
#include <vector>

#include "nextword/types.hpp"

namespace nextword {

// Word table with two reserved entries: id 0 is the boundary pad, id 1 the
// unknown-word bucket. Real words start at id 2, ordered by descending
// training frequency with lexicographic ties.
class Vocabulary {
public:
    Vocabulary();

    // Counts words over the token sequences, keeps those with
    // count >= min_count (capped at max_size real words when positive), and
    // books every dropped occurrence under the unknown id.
    static Vocabulary build(const std::vector<std::vector<std::string>>& sequences,
                            int min_count = 1, int max_size = 0);

    WordId id_of(const std::string& word) const;  // kUnkId when absent
    const std::string& word_of(WordId id) const;
    bool contains(const std::string& word) const;
    size_t size() const { return words_.size(); }
    int64_t freq(WordId id) const { return freqs_[id]; }

    std::vector<WordId> encode(const std::vector<std::string>& tokens) const;

    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

    bool operator==(const Vocabulary& o) const {
        return words_ == o.words_ && freqs_ == o.freqs_;
    }

private:
    std::vector<std::string> words_;
    std::vector<int64_t> freqs_;
    std::map<std::string, WordId> index_;

    void reindex();
};

}  // namespace nextword
