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

#include "nextword/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "nextword/io.hpp"
#include "nextword/utf8.hpp"
#include "nextword/vocab.hpp"

namespace nextword {

ScoredQuery score_distribution(const std::optional<Distribution>& dist,
                               const EvalQuery& q, int max_k) {
    ScoredQuery s;
    if (!dist.has_value()) return s;
    s.has_rec = true;
    auto list = top_k(*dist, max_k);
    s.top.reserve(list.size());
    for (const auto& [w, p] : list.items) s.top.push_back(w);
    s.truth_ranks.reserve(q.truths.size());
    s.truth_supported.reserve(q.truths.size());
    for (const auto& [w, count] : q.truths) {
        s.truth_ranks.push_back(full_rank(*dist, w));
        s.truth_supported.push_back(dist->probs[w] > 0.0 ? 1 : 0);
    }
    return s;
}

ScoredQuery score_query(const LanguageModel& model, const EvalQuery& q, int max_k) {
    return score_distribution(model.next_distribution(q.context), q, max_k);
}

std::vector<ScoredQuery> score_all(const LanguageModel& model,
                                   const std::vector<EvalQuery>& queries, int max_k) {
    std::vector<ScoredQuery> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(score_query(model, q, max_k));
    return out;
}

static void check_lengths(const std::vector<EvalQuery>& queries,
                          const std::vector<ScoredQuery>& scored) {
    if (queries.size() != scored.size()) {
        throw UsageError("queries and scored results must align");
    }
}

// Hits = truth instances whose word sits in the realized top-K list. A truth
// with multiplicity m counts m times, mirroring how it entered the data.
// Zero-probability truths never appear in a list, whatever their rank.
static int64_t hits_at_k(const EvalQuery& q, const ScoredQuery& s, int K) {
    int64_t hits = 0;
    for (size_t i = 0; i < q.truths.size(); ++i) {
        if (s.truth_supported[i] && s.truth_ranks[i] <= K) hits += q.truths[i].second;
    }
    return hits;
}

double precision_from(const std::vector<EvalQuery>& queries,
                      const std::vector<ScoredQuery>& scored, int K) {
    if (K < 1) throw UsageError("K must be >= 1");
    check_lengths(queries, scored);
    int64_t hits = 0;
    int64_t answered = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
        if (!scored[i].has_rec) continue;
        ++answered;
        hits += hits_at_k(queries[i], scored[i], K);
    }
    if (answered == 0) {
        throw NoUsableQueries("no query received a recommendation list");
    }
    return static_cast<double>(hits) / (static_cast<double>(K) * answered);
}

double recall_from(const std::vector<EvalQuery>& queries,
                   const std::vector<ScoredQuery>& scored, int K) {
    if (K < 1) throw UsageError("K must be >= 1");
    check_lengths(queries, scored);
    int64_t hits = 0;
    int64_t total = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
        total += queries[i].total;
        if (scored[i].has_rec) hits += hits_at_k(queries[i], scored[i], K);
    }
    if (total == 0) throw NoUsableQueries("no ground-truth instances to recall");
    return static_cast<double>(hits) / static_cast<double>(total);
}

double map_from(const std::vector<EvalQuery>& queries,
                const std::vector<ScoredQuery>& scored) {
    check_lengths(queries, scored);
    double sum = 0.0;
    int64_t total = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
        total += queries[i].total;
        if (!scored[i].has_rec) continue;  // those instances contribute 0
        for (size_t t = 0; t < queries[i].truths.size(); ++t) {
            sum += queries[i].truths[t].second /
                   static_cast<double>(scored[i].truth_ranks[t]);
        }
    }
    if (total == 0) throw NoUsableQueries("no ground-truth instances to rank");
    return sum / static_cast<double>(total);
}

double saved_chars_from(const std::vector<EvalQuery>& queries,
                        const std::vector<ScoredQuery>& scored, int K,
                        const Vocabulary& vocab) {
    if (K < 1) throw UsageError("K must be >= 1");
    check_lengths(queries, scored);
    double saved = 0.0;
    double total = 0.0;
    for (size_t i = 0; i < queries.size(); ++i) {
        for (size_t t = 0; t < queries[i].truths.size(); ++t) {
            const auto& [w, count] = queries[i].truths[t];
            double len = static_cast<double>(utf8::length(vocab.word_of(w)));
            total += count * len;
            if (scored[i].has_rec && scored[i].truth_supported[t] &&
                scored[i].truth_ranks[t] <= K) {
                saved += count * len;
            }
        }
    }
    if (total == 0.0) throw NoUsableQueries("no ground-truth instances to save");
    return saved / total;
}

double precision_at_k(const std::vector<EvalQuery>& queries, const LanguageModel& model,
                      int K) {
    return precision_from(queries, score_all(model, queries, K), K);
}

double recall_at_k(const std::vector<EvalQuery>& queries, const LanguageModel& model,
                   int K) {
    return recall_from(queries, score_all(model, queries, K), K);
}

double f1_score(double precision, double recall, double beta) {
    if (beta <= 0.0 || beta >= 1.0) throw UsageError("beta must lie in (0, 1)");
    double denom = beta * precision + (1.0 - beta) * recall;
    if (denom == 0.0) return 0.0;
    return precision * recall / denom;
}

double mean_average_precision(const std::vector<EvalQuery>& queries,
                              const LanguageModel& model) {
    return map_from(queries, score_all(model, queries, 1));
}

std::pair<double, double> saved_words_chars(const std::vector<EvalQuery>& queries,
                                            const LanguageModel& model, int K) {
    auto scored = score_all(model, queries, K);
    return {recall_from(queries, scored, K),
            saved_chars_from(queries, scored, K, model.vocabulary())};
}

MetricsReport evaluate_model(const LanguageModel& model,
                             const std::vector<EvalQuery>& queries, double beta) {
    auto scored = score_all(model, queries, 10);
    MetricsReport r;
    r.n_queries = queries.size();
    for (const auto& s : scored) {
        if (!s.has_rec) ++r.n_norec;
    }
    r.p1 = precision_from(queries, scored, 1);
    r.p3 = precision_from(queries, scored, 3);
    r.p5 = precision_from(queries, scored, 5);
    r.p10 = precision_from(queries, scored, 10);
    r.r10 = recall_from(queries, scored, 10);
    r.f1 = f1_score(r.p10, r.r10, beta);
    r.map = map_from(queries, scored);
    r.sw10 = r.r10;  // saved words is recall under another name
    r.sc10 = saved_chars_from(queries, scored, 10, model.vocabulary());
    return r;
}

// ---------------------------------------------------------------------------
// Sparsity

SparsityStats sparsity_rate(const LanguageModel& model,
                            const std::vector<EvalQuery>& queries) {
    SparsityStats st;
    for (const auto& q : queries) {
        bool norec = !model.next_distribution(q.context).has_value();

        int words = static_cast<int>(q.context_tokens.size());
        int count_bucket = std::clamp(words, 1, 5) - 1;
        size_t chars = 0;
        for (const auto& tok : q.context_tokens) chars += utf8::length(tok);
        double avg = words == 0 ? 0.0 : static_cast<double>(chars) / words;
        int len_bucket = std::clamp(static_cast<int>(std::floor(avg)), 1, 5) - 1;

        ++st.by_count[count_bucket].chances;
        ++st.by_avg_len[len_bucket].chances;
        if (norec) {
            ++st.by_count[count_bucket].norec;
            ++st.by_avg_len[len_bucket].norec;
        }
    }
    return st;
}

// ---------------------------------------------------------------------------
// Overlap

double overlap_from(const std::vector<ScoredQuery>& a, const std::vector<ScoredQuery>& b,
                    int K, bool jaccard) {
    if (K < 1) throw UsageError("K must be >= 1");
    if (a.size() != b.size()) throw UsageError("scored lists must align");
    double sum = 0.0;
    int64_t comparable = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i].has_rec || !b[i].has_rec) continue;
        ++comparable;
        std::vector<WordId> sa(a[i].top.begin(),
                               a[i].top.begin() + std::min<size_t>(a[i].top.size(), K));
        std::vector<WordId> sb(b[i].top.begin(),
                               b[i].top.begin() + std::min<size_t>(b[i].top.size(), K));
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        std::vector<WordId> inter;
        std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                              std::back_inserter(inter));
        double denom;
        if (jaccard) {
            denom = static_cast<double>(sa.size() + sb.size() - inter.size());
        } else {
            denom = static_cast<double>(K);
        }
        if (denom > 0.0) sum += static_cast<double>(inter.size()) / denom;
    }
    if (comparable == 0) {
        throw NoComparableQueries("no query was answered by both models");
    }
    return sum / static_cast<double>(comparable);
}

double overlap_rate(const LanguageModel& a, const LanguageModel& b,
                    const std::vector<EvalQuery>& queries, int K, bool jaccard) {
    return overlap_from(score_all(a, queries, K), score_all(b, queries, K), K, jaccard);
}

std::vector<std::vector<double>> overlap_matrix(
    const std::vector<const LanguageModel*>& models,
    const std::vector<EvalQuery>& queries, int K, bool jaccard) {
    std::vector<std::vector<ScoredQuery>> scored;
    scored.reserve(models.size());
    for (const auto* m : models) scored.push_back(score_all(*m, queries, K));
    std::vector<std::vector<double>> mat(models.size(),
                                         std::vector<double>(models.size(), 0.0));
    for (size_t i = 0; i < models.size(); ++i) {
        for (size_t j = i; j < models.size(); ++j) {
            double v = overlap_from(scored[i], scored[j], K, jaccard);
            mat[i][j] = v;
            mat[j][i] = v;
        }
    }
    return mat;
}

// ---------------------------------------------------------------------------
// Rendering

static const char* kMetricCols[] = {"P@1", "P@3", "P@5", "P@10", "R@10",
                                    "F1",  "MAP", "SC",  "queries", "no-rec"};

static std::vector<std::string> metric_cells(const MetricsReport& r, bool percent) {
    auto f = [&](double v) { return percent ? pct(v) : fmt_double(v); };
    return {f(r.p1),  f(r.p3),  f(r.p5),
            f(r.p10), f(r.r10), f(r.f1),
            f(r.map), f(r.sc10), std::to_string(r.n_queries),
            std::to_string(r.n_norec)};
}

std::string metrics_tsv(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::string out = "model";
    for (const char* c : kMetricCols) out += std::string("\t") + c;
    out += "\n";
    for (const auto& [name, r] : rows) {
        out += name;
        for (const auto& cell : metric_cells(r, false)) out += "\t" + cell;
        out += "\n";
    }
    return out;
}

static std::string padded(const std::string& s, size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

static std::string render_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> width(header.size());
    for (size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (size_t c = 0; c < header.size(); ++c) {
        out += padded(header[c], width[c]) + (c + 1 < header.size() ? "  " : "");
    }
    out += "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            out += padded(row[c], width[c]) + (c + 1 < row.size() ? "  " : "");
        }
        out += "\n";
    }
    return out;
}

std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::vector<std::string> header = {"model"};
    for (const char* c : kMetricCols) header.push_back(c);
    std::vector<std::vector<std::string>> body;
    for (const auto& [name, r] : rows) {
        std::vector<std::string> row = {name};
        for (const auto& cell : metric_cells(r, true)) row.push_back(cell);
        body.push_back(std::move(row));
    }
    return render_table(header, body);
}

static const char* kCountCols[] = {"n=1", "n=2", "n=3", "n=4", "n=5+"};
static const char* kLenCols[] = {"len[1,2)", "len[2,3)", "len[3,4)", "len[4,5)",
                                 "len[5,inf)"};

std::string sparsity_tsv(const std::vector<std::pair<std::string, SparsityStats>>& rows) {
    std::string out = "model\tbucket\tchances\tno_rec\trate\n";
    for (const auto& [name, st] : rows) {
        for (int i = 0; i < 5; ++i) {
            out += name + "\t" + kCountCols[i] + "\t" +
                   std::to_string(st.by_count[i].chances) + "\t" +
                   std::to_string(st.by_count[i].norec) + "\t" +
                   fmt_double(st.by_count[i].rate()) + "\n";
        }
        for (int i = 0; i < 5; ++i) {
            out += name + "\t" + kLenCols[i] + "\t" +
                   std::to_string(st.by_avg_len[i].chances) + "\t" +
                   std::to_string(st.by_avg_len[i].norec) + "\t" +
                   fmt_double(st.by_avg_len[i].rate()) + "\n";
        }
    }
    return out;
}

std::string sparsity_table(
    const std::vector<std::pair<std::string, SparsityStats>>& rows) {
    std::vector<std::string> header = {"model"};
    for (const char* c : kCountCols) header.push_back(c);
    for (const char* c : kLenCols) header.push_back(c);
    std::vector<std::vector<std::string>> body;
    for (const auto& [name, st] : rows) {
        std::vector<std::string> row = {name};
        for (int i = 0; i < 5; ++i) row.push_back(pct(st.by_count[i].rate()));
        for (int i = 0; i < 5; ++i) row.push_back(pct(st.by_avg_len[i].rate()));
        body.push_back(std::move(row));
    }
    return render_table(header, body);
}

std::string overlap_tsv(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& matrix) {
    std::string out = "overlap";
    for (const auto& n : names) out += "\t" + n;
    out += "\n";
    for (size_t i = 0; i < names.size(); ++i) {
        out += names[i];
        for (size_t j = 0; j < names.size(); ++j) out += "\t" + fmt_double(matrix[i][j]);
        out += "\n";
    }
    return out;
}

std::string overlap_table(const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& matrix) {
    std::vector<std::string> header = {"overlap"};
    for (const auto& n : names) header.push_back(n);
    std::vector<std::vector<std::string>> body;
    for (size_t i = 0; i < names.size(); ++i) {
        std::vector<std::string> row = {names[i]};
        for (size_t j = 0; j < names.size(); ++j) row.push_back(pct(matrix[i][j]));
        body.push_back(std::move(row));
    }
    return render_table(header, body);
}

}  // namespace nextword
