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

#include "nextword/config.hpp"

#include <cmath>
#include <functional>

#include "nextword/io.hpp"

namespace nextword {

ExperimentConfig ExperimentConfig::profile_defaults(const std::string& name) {
    ExperimentConfig c;
    c.profile = name;
    if (name == "desk") return c;  // the struct defaults are the desk profile
    if (name == "paper") {
        c.nlm_dim = 100;
        c.nlm_window = 6;
        c.nlm_hidden = 200;
        c.nlm_weight_decay = 1e-5;
        c.cbow_dim = 200;
        c.cbow_window = 5;
        c.cbow_negatives = 3;
        c.rnn_dim = 200;
        c.lstm_dim = 300;
        c.lstm_hidden = 300;
        return c;
    }
    throw UsageError("unknown profile '" + name + "' (expected paper or desk)");
}

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw UsageError("config key '" + key + "' wants true or false, got '" + value + "'");
}

int parse_pos_int(const std::string& key, const std::string& value, int min) {
    int64_t v;
    try {
        v = parse_int(value);
    } catch (const DataError&) {
        throw UsageError("config key '" + key + "' wants an integer, got '" + value + "'");
    }
    if (v < min) {
        throw UsageError("config key '" + key + "' must be >= " + std::to_string(min));
    }
    return static_cast<int>(v);
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const DataError&) {
        throw UsageError("config key '" + key + "' wants a number, got '" + value + "'");
    }
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "profile") {
        // Validated but otherwise inert here; load() uses it to pick a base.
        (void)profile_defaults(value);
        profile = value;
    } else if (key == "corpus") {
        corpus = value;
    } else if (key == "workdir") {
        workdir = value;
    } else if (key == "seed") {
        try {
            seed = static_cast<uint64_t>(parse_int(value));
        } catch (const DataError&) {
            throw UsageError("config key 'seed' wants an integer, got '" + value + "'");
        }
    } else if (key == "preprocess") {
        preprocess = parse_bool(key, value);
    } else if (key == "min_count") {
        min_count = parse_pos_int(key, value, 1);
    } else if (key == "max_vocab") {
        max_vocab = parse_pos_int(key, value, 0);
    } else if (key == "ngram_order") {
        ngram_order = parse_pos_int(key, value, 1);
    } else if (key == "nlm_dim") {
        nlm_dim = parse_pos_int(key, value, 1);
    } else if (key == "nlm_window") {
        nlm_window = parse_pos_int(key, value, 1);
    } else if (key == "nlm_hidden") {
        nlm_hidden = parse_pos_int(key, value, 1);
    } else if (key == "nlm_weight_decay") {
        nlm_weight_decay = parse_real(key, value);
    } else if (key == "cbow_dim") {
        cbow_dim = parse_pos_int(key, value, 1);
    } else if (key == "cbow_window") {
        cbow_window = parse_pos_int(key, value, 1);
    } else if (key == "cbow_negatives") {
        cbow_negatives = parse_pos_int(key, value, 1);
    } else if (key == "cbow_reverse_weights") {
        cbow_reverse_weights = parse_bool(key, value);
    } else if (key == "rnn_dim") {
        rnn_dim = parse_pos_int(key, value, 1);
    } else if (key == "lstm_dim") {
        lstm_dim = parse_pos_int(key, value, 1);
    } else if (key == "lstm_hidden") {
        lstm_hidden = parse_pos_int(key, value, 1);
    } else if (key == "lr") {
        lr = parse_real(key, value);
    } else if (key == "epochs") {
        epochs = parse_pos_int(key, value, 1);
    } else if (key == "init_scale") {
        init_scale = parse_real(key, value);
    } else if (key == "grad_clip") {
        grad_clip = parse_real(key, value);
    } else if (key == "bptt") {
        bptt = parse_pos_int(key, value, 1);
    } else if (key == "lambda_nlm") {
        lambda_nlm = parse_real(key, value);
    } else if (key == "lambda_cbow") {
        lambda_cbow = parse_real(key, value);
    } else if (key == "lambda_rnn") {
        lambda_rnn = parse_real(key, value);
    } else if (key == "lambda_lstm") {
        lambda_lstm = parse_real(key, value);
    } else if (key == "lambda1") {
        lambda1 = parse_real(key, value);
    } else if (key == "lambda2") {
        lambda2 = parse_real(key, value);
    } else if (key == "objective") {
        objective = value;
    } else if (key == "grid_step") {
        grid_step = parse_real(key, value);
    } else if (key == "top_k") {
        top_k = parse_pos_int(key, value, 1);
    } else {
        throw UsageError("unknown config key '" + key + "'");
    }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    auto lines = read_lines(path);

    // First pass: the profile key decides which defaults everything else
    // lands on, wherever in the file it sits.
    std::string base = "desk";
    std::vector<std::pair<std::string, std::string>> pairs;
    for (size_t n = 0; n < lines.size(); ++n) {
        std::string line = lines[n];
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(n + 1) +
                             ": expected key = value, got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw UsageError(path + ":" + std::to_string(n + 1) + ": empty key");
        }
        if (key == "profile") base = value;
        pairs.emplace_back(std::move(key), std::move(value));
    }

    ExperimentConfig cfg = profile_defaults(base);
    for (const auto& [key, value] : pairs) {
        if (key == "profile") continue;
        cfg.set(key, value);
    }
    return cfg;
}

std::string ExperimentConfig::to_text() const {
    std::string out;
    auto put = [&](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    };
    put("profile", profile);
    put("corpus", corpus);
    put("workdir", workdir);
    put("seed", std::to_string(seed));
    put("preprocess", preprocess ? "true" : "false");
    put("min_count", std::to_string(min_count));
    put("max_vocab", std::to_string(max_vocab));
    put("ngram_order", std::to_string(ngram_order));
    put("nlm_dim", std::to_string(nlm_dim));
    put("nlm_window", std::to_string(nlm_window));
    put("nlm_hidden", std::to_string(nlm_hidden));
    put("nlm_weight_decay", fmt_double(nlm_weight_decay));
    put("cbow_dim", std::to_string(cbow_dim));
    put("cbow_window", std::to_string(cbow_window));
    put("cbow_negatives", std::to_string(cbow_negatives));
    put("cbow_reverse_weights", cbow_reverse_weights ? "true" : "false");
    put("rnn_dim", std::to_string(rnn_dim));
    put("lstm_dim", std::to_string(lstm_dim));
    put("lstm_hidden", std::to_string(lstm_hidden));
    put("lr", fmt_double(lr));
    put("epochs", std::to_string(epochs));
    put("init_scale", fmt_double(init_scale));
    put("grad_clip", fmt_double(grad_clip));
    put("bptt", std::to_string(bptt));
    put("lambda_nlm", fmt_double(lambda_nlm));
    put("lambda_cbow", fmt_double(lambda_cbow));
    put("lambda_rnn", fmt_double(lambda_rnn));
    put("lambda_lstm", fmt_double(lambda_lstm));
    put("lambda1", fmt_double(lambda1));
    put("lambda2", fmt_double(lambda2));
    put("objective", objective);
    put("grid_step", fmt_double(grid_step));
    put("top_k", std::to_string(top_k));
    return out;
}

TrainConfig ExperimentConfig::train_config(const std::string& kind) const {
    TrainConfig tc;
    tc.lr = lr;
    tc.epochs = epochs;
    tc.seed = seed;
    tc.init_scale = init_scale;
    tc.weight_decay = kind == "nlm" ? nlm_weight_decay : 0.0;
    tc.grad_clip = (kind == "rnn" || kind == "lstm") ? grad_clip : 0.0;
    tc.bptt = bptt;
    return tc;
}

double ExperimentConfig::lambda_for(const std::string& kind) const {
    if (kind == "nlm") return lambda_nlm;
    if (kind == "cbow" || kind == "cbow-weighted") return lambda_cbow;
    if (kind == "rnn") return lambda_rnn;
    if (kind == "lstm") return lambda_lstm;
    return 0.5;
}

int ExperimentConfig::grid_steps() const {
    if (!(grid_step > 0.0 && grid_step <= 1.0)) {
        throw UsageError("grid_step must lie in (0, 1], got " + fmt_double(grid_step));
    }
    int steps = static_cast<int>(std::llround(1.0 / grid_step));
    if (steps < 1 || std::fabs(steps * grid_step - 1.0) > 1e-9) {
        throw UsageError("grid_step must divide 1 evenly, got " + fmt_double(grid_step));
    }
    return steps;
}

}  // namespace nextword
