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

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nextword/config.hpp"
#include "nextword/hybrid.hpp"
#include "nextword/types.hpp"

namespace nextword {

// Resolved artifact locations inside the working directory. The environment
// variable NEXTWORD_WORKDIR, when set, overrides the configured path.
struct Workdir {
    std::string dir;

    explicit Workdir(const ExperimentConfig& cfg);

    std::string vocab() const;
    std::string config_used() const;
    std::string manifest(const std::string& split) const;   // train|valid|test
    std::string split_text(const std::string& split) const;
    std::string queries(const std::string& split) const;    // valid|test
    std::string model(const std::string& kind) const;
    std::string weights(const std::string& combination) const;
    std::string sweep(const std::string& combination) const;
    std::string eval_metrics() const;
    std::string eval_sparsity() const;
    std::string eval_overlap() const;
    std::string report() const;
};

inline constexpr const char* kModelKinds[] = {"ngram", "ngram-kn",      "nlm", "cbow",
                                              "cbow-weighted", "rnn",  "lstm"};
bool is_model_kind(const std::string& name);

// A model by kind ("lstm") or a '+'-joined combination ("lstm+ngram-kn").
// Combinations load their components plus tuned weights when present,
// falling back to the config's default lambdas.
struct LoadedModel {
    std::string name;
    std::vector<std::unique_ptr<LanguageModel>> parts;  // owners, combos only
    std::unique_ptr<LanguageModel> model;
};
LoadedModel load_model_or_combination(const ExperimentConfig& cfg, const Workdir& wd,
                                      const std::string& name);

// Preprocess, split 80/10/10, build the vocabulary on the training part, and
// write every derived artifact. Rerunning with the same inputs rewrites
// byte-identical files.
void cmd_prepare(const ExperimentConfig& cfg, std::ostream& out);

// Train one model kind on the prepared training split and persist it.
void cmd_train(const ExperimentConfig& cfg, const std::string& kind, std::ostream& out);

// Grid-tune the mixture weight(s) of a combination on the validation
// queries; writes the chosen weights and the full sweep table.
void cmd_tune(const ExperimentConfig& cfg, const std::string& combination,
              std::ostream& out);

// Score every named model or combination on the test queries; writes metric,
// sparsity, and overlap tables and prints them.
void cmd_eval(const ExperimentConfig& cfg, const std::vector<std::string>& names,
              std::ostream& out);

// Interactive next-word session: context words in, ranked suggestions out.
// A pure index line picks that suggestion; a blank line resets the context.
void cmd_recommend(const ExperimentConfig& cfg, const std::string& name,
                   std::istream& in, std::ostream& out);

// Collect everything the workdir currently holds into one plain-text report.
void cmd_report(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace nextword
