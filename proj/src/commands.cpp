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

#include "nextword/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <istream>
#include <ostream>

#include "nextword/corpus.hpp"
#include "nextword/eval.hpp"
#include "nextword/io.hpp"
#include "nextword/neural.hpp"
#include "nextword/ngram.hpp"

namespace nextword {

Workdir::Workdir(const ExperimentConfig& cfg) {
    const char* env = std::getenv("NEXTWORD_WORKDIR");
    dir = (env != nullptr && *env != '\0') ? env : cfg.workdir;
}

std::string Workdir::vocab() const { return dir + "/vocab.tsv"; }
std::string Workdir::config_used() const { return dir + "/config.used.txt"; }
std::string Workdir::manifest(const std::string& split) const {
    return dir + "/manifest." + split + ".txt";
}
std::string Workdir::split_text(const std::string& split) const {
    return dir + "/" + split + ".txt";
}
std::string Workdir::queries(const std::string& split) const {
    return dir + "/queries." + split + ".tsv";
}
std::string Workdir::model(const std::string& kind) const {
    bool text = kind == "ngram" || kind == "ngram-kn";
    return dir + "/model." + kind + (text ? ".txt" : ".bin");
}
std::string Workdir::weights(const std::string& combination) const {
    return dir + "/weights." + combination + ".txt";
}
std::string Workdir::sweep(const std::string& combination) const {
    return dir + "/tune." + combination + ".tsv";
}
std::string Workdir::eval_metrics() const { return dir + "/eval.metrics.tsv"; }
std::string Workdir::eval_sparsity() const { return dir + "/eval.sparsity.tsv"; }
std::string Workdir::eval_overlap() const { return dir + "/eval.overlap.tsv"; }
std::string Workdir::report() const { return dir + "/report.txt"; }

bool is_model_kind(const std::string& name) {
    for (const char* k : kModelKinds) {
        if (name == k) return true;
    }
    return false;
}

namespace {

std::string kind_list() {
    std::string out;
    for (const char* k : kModelKinds) {
        if (!out.empty()) out += ", ";
        out += k;
    }
    return out;
}

Vocabulary load_vocab_checked(const Workdir& wd) {
    if (!file_exists(wd.vocab())) {
        throw DataError("missing " + wd.vocab() + " (run prepare first)");
    }
    return Vocabulary::load(wd.vocab());
}

std::vector<std::vector<WordId>> encode_corpus(const RawCorpus& c, const Vocabulary& v) {
    std::vector<std::vector<WordId>> out;
    out.reserve(c.size());
    for (const auto& seq : c.sequences) out.push_back(v.encode(seq));
    return out;
}

std::unique_ptr<LanguageModel> load_single(const Workdir& wd, const std::string& kind,
                                           const Vocabulary& vocab) {
    const std::string path = wd.model(kind);
    if (!file_exists(path)) {
        throw DataError("missing model file " + path + " (train " + kind + " first)");
    }
    if (kind == "ngram" || kind == "ngram-kn") return load_ngram_model(path, vocab);
    return load_neural_model(path, vocab);
}

std::vector<std::string> parse_combination(const std::string& combination) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : combination) {
        if (ch == '+') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (parts.size() < 2 || parts.size() > 3) {
        throw UsageError("combination '" + combination +
                         "' must join two or three model kinds with '+', e.g. nlm+ngram-kn");
    }
    for (const auto& p : parts) {
        if (!is_model_kind(p)) {
            throw UsageError("unknown model kind '" + p + "' in combination '" +
                             combination + "' (expected " + kind_list() + ")");
        }
    }
    return parts;
}

MixtureWeights read_weights_file(const std::string& path) {
    MixtureWeights w;
    bool saw1 = false;
    for (const auto& line : read_lines(path)) {
        auto f = split_ws(line);
        if (f.size() != 2) continue;
        if (f[0] == "lambda1") {
            w.lambda1 = parse_double(f[1]);
            saw1 = true;
        } else if (f[0] == "lambda2") {
            w.lambda2 = parse_double(f[1]);
        }
    }
    if (!saw1) throw DataError("weights file " + path + " carries no lambda1 line");
    return w;
}

// Six significant digits; plenty for a ranked list, short enough to read.
std::string fmt_score(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

}  // namespace

LoadedModel load_model_or_combination(const ExperimentConfig& cfg, const Workdir& wd,
                                      const std::string& name) {
    LoadedModel lm;
    lm.name = name;
    Vocabulary vocab = load_vocab_checked(wd);
    if (name.find('+') == std::string::npos) {
        if (!is_model_kind(name)) {
            throw UsageError("unknown model kind '" + name + "' (expected " + kind_list() +
                             ", or a '+'-joined combination)");
        }
        lm.model = load_single(wd, name, vocab);
        return lm;
    }
    auto parts = parse_combination(name);
    for (const auto& p : parts) lm.parts.push_back(load_single(wd, p, vocab));

    MixtureWeights w;
    if (file_exists(wd.weights(name))) {
        w = read_weights_file(wd.weights(name));
    } else if (parts.size() == 2) {
        w.lambda1 = cfg.lambda_for(parts[0]);
    } else {
        w.lambda1 = cfg.lambda1;
        w.lambda2 = cfg.lambda2;
    }
    std::vector<const LanguageModel*> raw;
    raw.reserve(lm.parts.size());
    for (const auto& p : lm.parts) raw.push_back(p.get());
    lm.model = std::make_unique<HybridModel>(std::move(raw), w);
    return lm;
}

void cmd_prepare(const ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.corpus.empty()) {
        throw UsageError("no corpus configured (set corpus = ... or pass --corpus)");
    }
    Workdir wd(cfg);
    RawCorpus raw = read_corpus(cfg.corpus);
    RawCorpus clean = cfg.preprocess ? preprocess(raw) : raw;
    SplitIndices split = split_corpus(clean, cfg.seed);
    RawCorpus train = take(clean, split.train);
    RawCorpus valid = take(clean, split.valid);
    RawCorpus test = take(clean, split.test);
    Vocabulary vocab = Vocabulary::build(train.sequences, cfg.min_count, cfg.max_vocab);
    auto valid_queries = make_queries(valid, vocab);
    auto test_queries = make_queries(test, vocab);

    std::filesystem::create_directories(wd.dir);
    write_split_manifest(split.train, wd.manifest("train"));
    write_split_manifest(split.valid, wd.manifest("valid"));
    write_split_manifest(split.test, wd.manifest("test"));
    write_corpus(train, wd.split_text("train"));
    write_corpus(valid, wd.split_text("valid"));
    write_corpus(test, wd.split_text("test"));
    vocab.save(wd.vocab());
    write_queries(valid_queries, wd.queries("valid"));
    write_queries(test_queries, wd.queries("test"));
    atomic_write(wd.config_used(), cfg.to_text());

    out << "corpus " << cfg.corpus << ": " << raw.size() << " sequences\n";
    out << "split " << split.train.size() << " train / " << split.valid.size()
        << " valid / " << split.test.size() << " test\n";
    out << "vocabulary " << vocab.size() - kFirstRegularId << " words (min_count "
        << cfg.min_count << ")\n";
    out << "queries " << valid_queries.size() << " valid / " << test_queries.size()
        << " test\n";
    out << "prepared " << wd.dir << "\n";
}

void cmd_train(const ExperimentConfig& cfg, const std::string& kind, std::ostream& out) {
    if (!is_model_kind(kind)) {
        throw UsageError("unknown model kind '" + kind + "' (expected " + kind_list() + ")");
    }
    Workdir wd(cfg);
    Vocabulary vocab = load_vocab_checked(wd);
    RawCorpus train = read_corpus(wd.split_text("train"));
    const std::string path = wd.model(kind);
    const int v = static_cast<int>(vocab.size());

    if (kind == "ngram" || kind == "ngram-kn") {
        NGramTable table = NGramTable::count(train, vocab, cfg.ngram_order);
        out << "counted 1.." << cfg.ngram_order << "-grams over " << train.size()
            << " sequences\n";
        if (kind == "ngram") {
            MleNgramModel model(vocab, table, false);
            model.save(path);
        } else {
            KNDiscounts d = estimate_discounts(table);
            KnNgramModel model(vocab, table, d);
            model.save(path);
        }
    } else {
        auto seqs = encode_corpus(train, vocab);
        TrainConfig tc = cfg.train_config(kind);
        std::vector<double> losses;
        if (kind == "nlm") {
            auto p = train_nlm(seqs, v, cfg.nlm_dim, cfg.nlm_window, cfg.nlm_hidden, tc,
                               &losses);
            NlmModel(vocab, std::move(p), tc).save(path);
        } else if (kind == "cbow" || kind == "cbow-weighted") {
            auto p = train_cbow(seqs, vocab, cfg.cbow_dim, cfg.cbow_window,
                                cfg.cbow_negatives, kind == "cbow-weighted",
                                cfg.cbow_reverse_weights, tc, &losses);
            CbowModel(vocab, std::move(p), tc).save(path);
        } else if (kind == "rnn") {
            auto p = train_rnn(seqs, v, cfg.rnn_dim, tc, &losses);
            RnnModel(vocab, std::move(p), tc).save(path);
        } else {
            auto p = train_lstm(seqs, v, cfg.lstm_dim, cfg.lstm_hidden, tc, &losses);
            LstmModel(vocab, std::move(p), tc).save(path);
        }
        for (size_t e = 0; e < losses.size(); ++e) {
            out << "epoch " << e + 1 << "/" << losses.size() << " loss "
                << fmt_score(losses[e]) << "\n";
        }
    }
    out << "wrote " << path << "\n";
}

void cmd_tune(const ExperimentConfig& cfg, const std::string& combination,
              std::ostream& out) {
    Workdir wd(cfg);
    auto parts = parse_combination(combination);
    Vocabulary vocab = load_vocab_checked(wd);
    std::vector<std::unique_ptr<LanguageModel>> models;
    models.reserve(parts.size());
    for (const auto& p : parts) models.push_back(load_single(wd, p, vocab));
    auto queries = read_queries(wd.queries("valid"), vocab);
    TuneObjective objective = parse_objective(cfg.objective);
    int steps = cfg.grid_steps();

    TuneResult r = parts.size() == 2
                       ? tune_lambda2(*models[0], *models[1], queries, objective, steps)
                       : tune_lambda3(*models[0], *models[1], *models[2], queries,
                                      objective, steps);
    const bool three = parts.size() == 3;
    atomic_write(wd.sweep(combination), sweep_tsv(r, three));

    std::string weights = "combination " + combination + "\n";
    weights += "objective " + std::string(objective_name(objective)) + "\n";
    weights += "lambda1 " + fmt_double(r.best.lambda1) + "\n";
    if (three) weights += "lambda2 " + fmt_double(r.best.lambda2) + "\n";
    weights += "metric " + fmt_double(r.table[r.best_index].metric(objective)) + "\n";
    atomic_write(wd.weights(combination), weights);

    out << "swept " << r.table.size() << " grid points on " << queries.size()
        << " validation queries\n";
    out << "best lambda1 " << fmt_double(r.best.lambda1);
    if (three) out << " lambda2 " << fmt_double(r.best.lambda2);
    out << " (" << objective_name(objective) << " "
        << pct(r.table[r.best_index].metric(objective)) << ")\n";
    out << "wrote " << wd.sweep(combination) << "\n";
    out << "wrote " << wd.weights(combination) << "\n";
}

void cmd_eval(const ExperimentConfig& cfg, const std::vector<std::string>& names,
              std::ostream& out) {
    if (names.empty()) throw UsageError("eval needs at least one model or combination");
    Workdir wd(cfg);
    Vocabulary vocab = load_vocab_checked(wd);
    auto queries = read_queries(wd.queries("test"), vocab);

    std::vector<LoadedModel> loaded;
    loaded.reserve(names.size());
    for (const auto& n : names) loaded.push_back(load_model_or_combination(cfg, wd, n));

    std::vector<std::pair<std::string, MetricsReport>> metric_rows;
    std::vector<std::pair<std::string, SparsityStats>> sparsity_rows;
    std::vector<const LanguageModel*> models;
    std::vector<std::string> labels;
    for (const auto& lm : loaded) {
        metric_rows.emplace_back(lm.name, evaluate_model(*lm.model, queries));
        sparsity_rows.emplace_back(lm.name, sparsity_rate(*lm.model, queries));
        models.push_back(lm.model.get());
        labels.push_back(lm.name);
    }
    auto matrix = overlap_matrix(models, queries, 10, true);

    atomic_write(wd.eval_metrics(), metrics_tsv(metric_rows));
    atomic_write(wd.eval_sparsity(), sparsity_tsv(sparsity_rows));
    atomic_write(wd.eval_overlap(), overlap_tsv(labels, matrix));

    out << metrics_table(metric_rows) << "\n";
    out << sparsity_table(sparsity_rows) << "\n";
    out << overlap_table(labels, matrix) << "\n";
    out << "wrote " << wd.eval_metrics() << "\n";
    out << "wrote " << wd.eval_sparsity() << "\n";
    out << "wrote " << wd.eval_overlap() << "\n";
}

void cmd_recommend(const ExperimentConfig& cfg, const std::string& name,
                   std::istream& in, std::ostream& out) {
    Workdir wd(cfg);
    LoadedModel lm = load_model_or_combination(cfg, wd, name);
    const Vocabulary& vocab = lm.model->vocabulary();

    std::vector<std::string> shown;  // context as typed, OOV marked
    Context ctx;
    RecommendationList last;

    out << "model " << lm.name << " — type context words; a listed index accepts "
        << "that word; blank line clears; end of input quits\n";

    auto prompt = [&] {
        out << "[";
        for (size_t i = 0; i < shown.size(); ++i) {
            if (i > 0) out << " ";
            out << shown[i];
        }
        out << "]> ";
    };
    auto recommend = [&] {
        last.items.clear();
        auto dist = lm.model->next_distribution(ctx);
        if (!dist.has_value()) {
            out << "(no recommendation)\n";
            return;
        }
        last = top_k(*dist, cfg.top_k);
        if (last.size() == 0) {
            out << "(no recommendation)\n";
            return;
        }
        for (size_t i = 0; i < last.size(); ++i) {
            out << i + 1 << ". " << vocab.word_of(last.items[i].first) << " "
                << fmt_score(last.items[i].second) << "\n";
        }
    };
    auto push_word = [&](const std::string& tok) {
        std::string word = tok;
        if (cfg.preprocess) {
            auto pp = preprocess(std::vector<std::string>{tok});
            if (pp.empty()) {
                out << "(ignored: " << tok << ")\n";
                return;
            }
            word = pp[0];
        }
        WordId id = vocab.id_of(word);
        shown.push_back(id == kUnkId ? word + "[UNK]" : word);
        ctx.push_back(id);
    };

    std::string line;
    prompt();
    while (std::getline(in, line)) {
        auto toks = split_ws(line);
        if (toks.empty()) {
            shown.clear();
            ctx.clear();
            last.items.clear();
            out << "(context cleared)\n";
            prompt();
            continue;
        }
        bool is_index = toks.size() == 1 && last.size() > 0 &&
                        toks[0].find_first_not_of("0123456789") == std::string::npos;
        if (is_index) {
            int64_t idx = parse_int(toks[0]);
            if (idx < 1 || idx > static_cast<int64_t>(last.size())) {
                out << "(no item " << idx << ")\n";
                prompt();
                continue;
            }
            const std::string& word = vocab.word_of(last.items[idx - 1].first);
            shown.push_back(word);
            ctx.push_back(last.items[idx - 1].first);
        } else {
            for (const auto& tok : toks) push_word(tok);
        }
        recommend();
        prompt();
    }
    out << "\n";
}

void cmd_report(const ExperimentConfig& cfg, std::ostream& out) {
    Workdir wd(cfg);
    std::string text = "nextword experiment report\n";
    text += "==========================\n\n";

    if (!file_exists(wd.config_used())) {
        text += "workdir " + wd.dir + " holds no prepared experiment yet\n";
        atomic_write(wd.report(), text);
        out << text;
        out << "wrote " << wd.report() << "\n";
        return;
    }

    text += "configuration (as prepared)\n---------------------------\n";
    text += read_file(wd.config_used());
    text += "\n";

    text += "data\n----\n";
    for (const char* split : {"train", "valid", "test"}) {
        const std::string path = wd.split_text(split);
        if (!file_exists(path)) continue;
        RawCorpus c = read_corpus(path);
        size_t tokens = 0;
        for (const auto& seq : c.sequences) tokens += seq.size();
        text += std::string(split) + ": " + std::to_string(c.size()) + " sequences, " +
                std::to_string(tokens) + " tokens\n";
    }
    if (file_exists(wd.vocab())) {
        Vocabulary vocab = Vocabulary::load(wd.vocab());
        text += "vocabulary: " + std::to_string(vocab.size() - kFirstRegularId) +
                " words\n";
    }
    text += "\n";

    text += "models\n------\n";
    bool any_model = false;
    for (const char* kind : kModelKinds) {
        if (!file_exists(wd.model(kind))) continue;
        text += std::string(kind) + ": " + wd.model(kind) + "\n";
        any_model = true;
    }
    if (!any_model) text += "(none trained)\n";
    text += "\n";

    // Tuned weights, in name order for stable output.
    std::vector<std::string> weight_files;
    for (const auto& entry : std::filesystem::directory_iterator(wd.dir)) {
        const std::string fname = entry.path().filename().string();
        if (fname.rfind("weights.", 0) == 0) weight_files.push_back(entry.path().string());
    }
    std::sort(weight_files.begin(), weight_files.end());
    if (!weight_files.empty()) {
        text += "tuned mixtures\n--------------\n";
        for (const auto& f : weight_files) {
            text += read_file(f);
            text += "\n";
        }
    }

    for (const auto& [label, path] :
         std::vector<std::pair<std::string, std::string>>{
             {"test metrics", wd.eval_metrics()},
             {"sparsity", wd.eval_sparsity()},
             {"overlap", wd.eval_overlap()}}) {
        if (!file_exists(path)) continue;
        text += label + "\n" + std::string(label.size(), '-') + "\n";
        text += read_file(path);
        text += "\n";
    }

    atomic_write(wd.report(), text);
    out << text;
    out << "wrote " << wd.report() << "\n";
}

}  // namespace nextword
