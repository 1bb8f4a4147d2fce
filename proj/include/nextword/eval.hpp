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

#include <array>
#include <string>
#include <vector>

#include "nextword/corpus.hpp"
#include "nextword/types.hpp"

namespace nextword {

// Harmonic-style tradeoff between precision and recall. The default beta
// leans toward recall.
inline constexpr double kF1Beta = 2.0 / 3.0;

// One model's answer to one query, reduced to what the metrics need: the
// ranked head of the list plus the full-ordering rank of every truth word.
struct ScoredQuery {
    bool has_rec = false;
    std::vector<WordId> top;           // best max_k ids, probability desc, id asc
    std::vector<int> truth_ranks;      // parallel to EvalQuery::truths, 1-based
    std::vector<char> truth_supported; // 1 iff the truth has positive probability
};

ScoredQuery score_distribution(const std::optional<Distribution>& dist,
                               const EvalQuery& q, int max_k);
ScoredQuery score_query(const LanguageModel& model, const EvalQuery& q, int max_k);
std::vector<ScoredQuery> score_all(const LanguageModel& model,
                                   const std::vector<EvalQuery>& queries, int max_k);

// Metric kernels over pre-scored queries. Each model-facing wrapper below is
// a thin composition of score_all with one of these, so a batch evaluation
// that scores once computes identical values.
double precision_from(const std::vector<EvalQuery>& queries,
                      const std::vector<ScoredQuery>& scored, int K);
double recall_from(const std::vector<EvalQuery>& queries,
                   const std::vector<ScoredQuery>& scored, int K);
double map_from(const std::vector<EvalQuery>& queries,
                const std::vector<ScoredQuery>& scored);
double saved_chars_from(const std::vector<EvalQuery>& queries,
                        const std::vector<ScoredQuery>& scored, int K,
                        const Vocabulary& vocab);

double precision_at_k(const std::vector<EvalQuery>& queries, const LanguageModel& model,
                      int K);
double recall_at_k(const std::vector<EvalQuery>& queries, const LanguageModel& model,
                   int K);
double f1_score(double precision, double recall, double beta = kF1Beta);
double mean_average_precision(const std::vector<EvalQuery>& queries,
                              const LanguageModel& model);
// (saved words, saved characters); the former equals recall_at_k by
// definition and is returned bit-equal.
std::pair<double, double> saved_words_chars(const std::vector<EvalQuery>& queries,
                                            const LanguageModel& model, int K);

// Everything the comparison table reports, from one scoring pass.
struct MetricsReport {
    double p1 = 0, p3 = 0, p5 = 0, p10 = 0;
    double r10 = 0, f1 = 0, map = 0, sw10 = 0, sc10 = 0;
    size_t n_queries = 0;
    size_t n_norec = 0;
};

MetricsReport evaluate_model(const LanguageModel& model,
                             const std::vector<EvalQuery>& queries,
                             double beta = kF1Beta);

// ---------------------------------------------------------------------------
// Noise analyses

struct SparsityCell {
    size_t chances = 0;  // queries that fell in this bucket
    size_t norec = 0;    // of those, how many the model declined
    double rate() const {
        return chances == 0 ? 0.0 : static_cast<double>(norec) / chances;
    }
};

// Two groupings of the same queries: by how many words the context holds
// (1..5, longer contexts count as 5) and by the average character length of
// a context word ([1,2) .. [5,inf)).
struct SparsityStats {
    std::array<SparsityCell, 5> by_count;
    std::array<SparsityCell, 5> by_avg_len;
};

SparsityStats sparsity_rate(const LanguageModel& model,
                            const std::vector<EvalQuery>& queries);

// Mean per-query agreement of two models' top-K sets, over queries both
// models answer. Jaccard by default; the alternative divides the
// intersection by K instead of by the union.
double overlap_from(const std::vector<ScoredQuery>& a, const std::vector<ScoredQuery>& b,
                    int K, bool jaccard = true);
double overlap_rate(const LanguageModel& a, const LanguageModel& b,
                    const std::vector<EvalQuery>& queries, int K = 10,
                    bool jaccard = true);
std::vector<std::vector<double>> overlap_matrix(
    const std::vector<const LanguageModel*>& models,
    const std::vector<EvalQuery>& queries, int K = 10, bool jaccard = true);

// ---------------------------------------------------------------------------
// Report rendering. The TSV forms carry full-precision numbers; the tables
// show percentages rounded to three decimals.

std::string metrics_tsv(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string sparsity_tsv(const std::vector<std::pair<std::string, SparsityStats>>& rows);
std::string sparsity_table(
    const std::vector<std::pair<std::string, SparsityStats>>& rows);
std::string overlap_tsv(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& matrix);
std::string overlap_table(const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& matrix);

}  // namespace nextword
