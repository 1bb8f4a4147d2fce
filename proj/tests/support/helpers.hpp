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
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nextword/corpus.hpp"
#include "nextword/io.hpp"
#include "nextword/types.hpp"
#include "nextword/vocab.hpp"

namespace testhelp {

inline nextword::RawCorpus corpus_of(std::initializer_list<const char*> lines) {
    nextword::RawCorpus c;
    for (const char* line : lines) {
        c.sequences.push_back(nextword::split_ws(line));
    }
    return c;
}

// A model whose answers are whatever the test scripts, keyed by exact
// context; unscripted contexts decline.
class ScriptedModel : public nextword::LanguageModel {
public:
    explicit ScriptedModel(nextword::Vocabulary v) : vocab_(std::move(v)) {}

    void answer(const nextword::Context& ctx,
                const std::vector<std::pair<nextword::WordId, double>>& probs) {
        nextword::Distribution d(vocab_.size());
        for (const auto& [w, p] : probs) d.probs[w] = p;
        answers_[ctx] = std::move(d);
    }

    std::string_view kind() const override { return "scripted"; }
    const nextword::Vocabulary& vocabulary() const override { return vocab_; }
    std::optional<nextword::Distribution> next_distribution(
        const nextword::Context& ctx) const override {
        auto it = answers_.find(ctx);
        if (it == answers_.end()) return std::nullopt;
        return it->second;
    }

private:
    nextword::Vocabulary vocab_;
    std::map<nextword::Context, nextword::Distribution> answers_;
};

inline nextword::EvalQuery make_q(std::vector<std::string> toks, nextword::Context ctx,
                                  std::vector<std::pair<nextword::WordId, int>> truths) {
    nextword::EvalQuery q;
    q.context_tokens = std::move(toks);
    q.context = std::move(ctx);
    std::sort(truths.begin(), truths.end());
    q.truths = std::move(truths);
    for (const auto& [w, c] : q.truths) q.total += c;
    return q;
}

// Fresh scratch directory under the build tree, wiped on entry.
inline std::string scratch_dir(const std::string& name) {
    auto dir = std::filesystem::path("test_tmp") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace testhelp
