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
#include <string>

#include "nextword/neural.hpp"

namespace nextword {

// Everything one experiment needs, resolvable from a profile, a key=value
// config file, and command-line overrides — in that order of precedence.
// Two built-in profiles: "paper" carries the full-size hyperparameters,
// "desk" shrinks every dimension so a laptop run finishes in seconds.
struct ExperimentConfig {
    std::string profile = "desk";
    std::string corpus;              // input text, one word sequence per line
    std::string workdir = "workdir";

    uint64_t seed = 1;
    bool preprocess = true;          // digit folding + ASCII-word dropping
    int min_count = 1;
    int max_vocab = 0;               // 0 = unlimited
    int ngram_order = 3;

    int nlm_dim = 16;
    int nlm_window = 3;
    int nlm_hidden = 16;
    double nlm_weight_decay = 0.0;
    int cbow_dim = 16;
    int cbow_window = 3;
    int cbow_negatives = 3;
    bool cbow_reverse_weights = false;
    int rnn_dim = 16;
    int lstm_dim = 16;
    int lstm_hidden = 16;

    double lr = 0.05;
    int epochs = 5;
    double init_scale = 0.05;
    double grad_clip = 5.0;          // recurrent models only
    int bptt = 16;

    // Default mixture weight of each neural family against the count model,
    // plus the three-way pair; tuned weight files take precedence.
    double lambda_nlm = 0.5;
    double lambda_cbow = 0.8;
    double lambda_rnn = 0.9;
    double lambda_lstm = 0.9;
    double lambda1 = 0.3;
    double lambda2 = 0.2;
    std::string objective = "MAP";
    double grid_step = 0.1;

    int top_k = 5;                   // recommendation list length in the REPL

    // Profile presets; throws UsageError for anything but paper/desk.
    static ExperimentConfig profile_defaults(const std::string& name);

    // Reads a key=value file ('#' comments). A `profile` key rebases onto
    // that profile's defaults before the file's other keys apply.
    static ExperimentConfig load(const std::string& path);

    // Applies one key; throws UsageError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    // Canonical dump; load(to_text()) round-trips every field.
    std::string to_text() const;

    // Optimizer settings for one model kind: weight decay reaches only the
    // feedforward net, gradient clipping only the recurrent ones.
    TrainConfig train_config(const std::string& kind) const;

    // Default two-way weight for a neural kind mixed with a count model.
    double lambda_for(const std::string& kind) const;

    // grid_step as a whole number of steps; UsageError unless it divides 1.
    int grid_steps() const;
};

}  // namespace nextword
