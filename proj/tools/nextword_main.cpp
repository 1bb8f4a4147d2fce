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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nextword/commands.hpp"
#include "nextword/config.hpp"
#include "nextword/types.hpp"

namespace {

// Precedence, lowest to highest: profile defaults, config file keys,
// --set overrides, dedicated flags.
struct Options {
    std::string config_file;
    std::string profile;
    std::string corpus;
    std::string workdir;
    std::vector<std::string> sets;
    bool seed_given = false;
    uint64_t seed = 0;
};

nextword::ExperimentConfig resolve_config(const Options& opt) {
    using nextword::ExperimentConfig;
    ExperimentConfig cfg;
    if (!opt.config_file.empty()) {
        cfg = ExperimentConfig::load(opt.config_file);
        if (!opt.profile.empty() && opt.profile != cfg.profile) {
            // The flag outranks the file's profile key: rebase and re-apply.
            ExperimentConfig rebased = ExperimentConfig::profile_defaults(opt.profile);
            rebased.corpus = cfg.corpus;
            rebased.workdir = cfg.workdir;
            rebased.seed = cfg.seed;
            cfg = rebased;
        }
    } else {
        cfg = ExperimentConfig::profile_defaults(opt.profile.empty() ? "desk"
                                                                     : opt.profile);
    }
    for (const auto& kv : opt.sets) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw nextword::UsageError("--set wants KEY=VALUE, got '" + kv + "'");
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!opt.corpus.empty()) cfg.corpus = opt.corpus;
    if (!opt.workdir.empty()) cfg.workdir = opt.workdir;
    if (opt.seed_given) cfg.seed = opt.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nextword — n-gram, neural, and hybrid next-word recommendation lab"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_file, "key=value experiment config file");
    app.add_option("--profile", opt.profile, "built-in profile: paper or desk");
    app.add_option("--corpus", opt.corpus, "corpus path (one word sequence per line)");
    app.add_option("--workdir", opt.workdir,
                   "artifact directory (env NEXTWORD_WORKDIR overrides)");
    auto* seed_opt = app.add_option("--seed", opt.seed, "master random seed");
    app.add_option("--set", opt.sets, "override any config key, KEY=VALUE")
        ->take_all();

    auto* prepare = app.add_subcommand("prepare", "preprocess, split, build vocabulary");

    std::vector<std::string> train_kinds;
    auto* train = app.add_subcommand("train", "train and persist one or more models");
    train->add_option("kind", train_kinds,
                      "ngram | ngram-kn | nlm | cbow | cbow-weighted | rnn | lstm")
        ->required();

    std::vector<std::string> tune_combos;
    auto* tune = app.add_subcommand("tune", "grid-tune mixture weights on validation");
    tune->add_option("combination", tune_combos, "e.g. nlm+ngram-kn or nlm+cbow+ngram")
        ->required();

    std::vector<std::string> eval_names;
    auto* eval = app.add_subcommand("eval", "score models/combinations on test queries");
    eval->add_option("model", eval_names, "model kinds and/or '+'-combinations")
        ->required();

    std::string rec_name;
    auto* recommend = app.add_subcommand("recommend", "interactive suggestion session");
    recommend->add_option("model", rec_name, "model kind or '+'-combination")->required();

    auto* report = app.add_subcommand("report", "summarize the workdir's artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        opt.seed_given = seed_opt->count() > 0;
        nextword::ExperimentConfig cfg = resolve_config(opt);
        if (prepare->parsed()) {
            nextword::cmd_prepare(cfg, std::cout);
        } else if (train->parsed()) {
            for (const auto& kind : train_kinds) {
                nextword::cmd_train(cfg, kind, std::cout);
            }
        } else if (tune->parsed()) {
            for (const auto& combo : tune_combos) {
                nextword::cmd_tune(cfg, combo, std::cout);
            }
        } else if (eval->parsed()) {
            nextword::cmd_eval(cfg, eval_names, std::cout);
        } else if (recommend->parsed()) {
            nextword::cmd_recommend(cfg, rec_name, std::cin, std::cout);
        } else if (report->parsed()) {
            nextword::cmd_report(cfg, std::cout);
        }
        return 0;
    } catch (const nextword::DivergenceDetected& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const nextword::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const nextword::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
