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

#include "nextword/hybrid.hpp"

#include <algorithm>
#include <cstddef>

#include "nextword/eval.hpp"
#include "nextword/io.hpp"

namespace nextword {

// Grid arithmetic can land a hair above the simplex boundary; weights that
// close to legal are accepted rather than rejected over an ulp.
static constexpr double kWeightSlack = 1e-9;

static void check_same_size(const Distribution& a, const Distribution& b) {
    if (a.size() != b.size()) {
        throw VocabularyMismatch("cannot mix distributions over different vocabularies");
    }
}

std::optional<Distribution> interpolate2(const std::optional<Distribution>& first,
                                         const std::optional<Distribution>& second,
                                         double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw WeightOutOfRange("mixture weight must lie in [0, 1], got " + fmt_double(lambda));
    }
    if (!first.has_value() && !second.has_value()) return std::nullopt;
    if (!first.has_value()) return second;
    if (!second.has_value()) return first;
    // Endpoints hand back the input untouched so no rounding sneaks in.
    if (lambda == 1.0) return first;
    if (lambda == 0.0) return second;
    check_same_size(*first, *second);
    Distribution out(first->size());
    const double mu = 1.0 - lambda;
    for (size_t w = 0; w < out.size(); ++w) {
        out.probs[w] = lambda * first->probs[w] + mu * second->probs[w];
    }
    return out;
}

std::optional<Distribution> interpolate3(const std::optional<Distribution>& first,
                                         const std::optional<Distribution>& second,
                                         const std::optional<Distribution>& third,
                                         double lambda1, double lambda2) {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(lambda1 + lambda2 <= 1.0 + kWeightSlack)) {
        throw WeightOutOfRange("three-way weights need lambda1, lambda2 >= 0 and lambda1 + lambda2 <= 1, got " +
                               fmt_double(lambda1) + " and " + fmt_double(lambda2));
    }
    const double lambda3 = std::max(0.0, 1.0 - lambda1 - lambda2);

    struct Part {
        const std::optional<Distribution>* dist;
        double weight;
    };
    Part all[] = {{&first, lambda1}, {&second, lambda2}, {&third, lambda3}};
    Part present[3];
    size_t n = 0;
    for (const Part& p : all) {
        if (p.dist->has_value()) present[n++] = p;
    }
    if (n == 0) return std::nullopt;
    if (n == 1) return *present[0].dist;  // unscaled, whatever its weight

    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += present[i].weight;
    for (size_t i = 0; i < n; ++i) {
        // Renormalize over what answered; if the answered share is weightless,
        // fall back to an even split rather than divide by zero.
        present[i].weight = total > 0.0 ? present[i].weight / total : 1.0 / double(n);
    }

    for (size_t i = 1; i < n; ++i) check_same_size(**present[0].dist, **present[i].dist);
    Distribution out((*present[0].dist)->size());
    for (size_t i = 0; i < n; ++i) {
        const Distribution& d = **present[i].dist;
        const double w = present[i].weight;
        for (size_t v = 0; v < out.size(); ++v) out.probs[v] += w * d.probs[v];
    }
    return out;
}

void MixtureWeights::validate(size_t components) const {
    if (components == 2) {
        if (!(lambda1 >= 0.0 && lambda1 <= 1.0)) {
            throw WeightOutOfRange("mixture weight must lie in [0, 1], got " + fmt_double(lambda1));
        }
        return;
    }
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(lambda1 + lambda2 <= 1.0 + kWeightSlack)) {
        throw WeightOutOfRange("three-way weights need lambda1, lambda2 >= 0 and lambda1 + lambda2 <= 1, got " +
                               fmt_double(lambda1) + " and " + fmt_double(lambda2));
    }
}

HybridModel::HybridModel(std::vector<const LanguageModel*> components, MixtureWeights weights)
    : components_(std::move(components)), weights_(weights) {
    if (components_.size() != 2 && components_.size() != 3) {
        throw UsageError("a hybrid takes two or three component models, got " +
                         std::to_string(components_.size()));
    }
    for (const LanguageModel* c : components_) {
        if (c == nullptr) throw UsageError("hybrid component must not be null");
    }
    for (size_t i = 1; i < components_.size(); ++i) {
        if (!(components_[i]->vocabulary() == components_[0]->vocabulary())) {
            throw VocabularyMismatch("hybrid components must share one vocabulary");
        }
    }
    weights_.validate(components_.size());
}

const Vocabulary& HybridModel::vocabulary() const { return components_[0]->vocabulary(); }

std::optional<Distribution> HybridModel::next_distribution(const Context& ctx) const {
    if (components_.size() == 2) {
        return interpolate2(components_[0]->next_distribution(ctx),
                            components_[1]->next_distribution(ctx), weights_.lambda1);
    }
    return interpolate3(components_[0]->next_distribution(ctx),
                        components_[1]->next_distribution(ctx),
                        components_[2]->next_distribution(ctx),
                        weights_.lambda1, weights_.lambda2);
}

// ---------------------------------------------------------------------------
// Tuning

TuneObjective parse_objective(const std::string& name) {
    if (name == "MAP" || name == "map") return TuneObjective::kMap;
    if (name == "P@1" || name == "p@1") return TuneObjective::kPrecisionAt1;
    if (name == "R@10" || name == "r@10") return TuneObjective::kRecallAt10;
    if (name == "F1" || name == "f1") return TuneObjective::kF1;
    throw UsageError("unknown tuning objective '" + name + "' (expected MAP, P@1, R@10 or F1)");
}

std::string_view objective_name(TuneObjective objective) {
    switch (objective) {
        case TuneObjective::kMap: return "MAP";
        case TuneObjective::kPrecisionAt1: return "P@1";
        case TuneObjective::kRecallAt10: return "R@10";
        case TuneObjective::kF1: return "F1";
    }
    return "MAP";
}

double TunePoint::metric(TuneObjective objective) const {
    switch (objective) {
        case TuneObjective::kMap: return map;
        case TuneObjective::kPrecisionAt1: return p1;
        case TuneObjective::kRecallAt10: return r10;
        case TuneObjective::kF1: return f1;
    }
    return map;
}

namespace {

// Component answers fetched once per query; every grid point remixes these,
// so an n-point sweep costs one model pass, not n.
using Cached = std::vector<std::optional<Distribution>>;

Cached cache_answers(const LanguageModel& model, const std::vector<EvalQuery>& queries) {
    Cached out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(model.next_distribution(q.context));
    return out;
}

template <typename MixFn>
TunePoint measure_point(const std::vector<EvalQuery>& queries, MixtureWeights w,
                        const MixFn& mix) {
    std::vector<ScoredQuery> scored;
    scored.reserve(queries.size());
    for (size_t i = 0; i < queries.size(); ++i) {
        scored.push_back(score_distribution(mix(i), queries[i], 10));
    }
    TunePoint pt;
    pt.weights = w;
    pt.p1 = precision_from(queries, scored, 1);
    pt.p10 = precision_from(queries, scored, 10);
    pt.r10 = recall_from(queries, scored, 10);
    pt.f1 = f1_score(pt.p10, pt.r10);
    pt.map = map_from(queries, scored);
    return pt;
}

TuneResult pick_best(std::vector<TunePoint> table, TuneObjective objective) {
    TuneResult r;
    r.table = std::move(table);
    for (size_t i = 1; i < r.table.size(); ++i) {
        // Strict improvement only, so a tie keeps the earlier (smaller) weight.
        if (r.table[i].metric(objective) > r.table[r.best_index].metric(objective)) {
            r.best_index = i;
        }
    }
    r.best = r.table[r.best_index].weights;
    return r;
}

void check_tunable(const std::vector<EvalQuery>& queries, int steps) {
    if (steps < 1) throw UsageError("grid steps must be >= 1");
    if (queries.empty()) throw EmptyValidationSet("tuning needs a non-empty validation set");
}

}  // namespace

TuneResult tune_lambda2(const LanguageModel& first, const LanguageModel& second,
                        const std::vector<EvalQuery>& queries,
                        TuneObjective objective, int steps) {
    check_tunable(queries, steps);
    const Cached a = cache_answers(first, queries);
    const Cached b = cache_answers(second, queries);
    std::vector<TunePoint> table;
    table.reserve(size_t(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
        MixtureWeights w;
        w.lambda1 = double(k) / double(steps);
        table.push_back(measure_point(queries, w, [&](size_t i) {
            return interpolate2(a[i], b[i], w.lambda1);
        }));
    }
    return pick_best(std::move(table), objective);
}

TuneResult tune_lambda3(const LanguageModel& first, const LanguageModel& second,
                        const LanguageModel& third,
                        const std::vector<EvalQuery>& queries,
                        TuneObjective objective, int steps) {
    check_tunable(queries, steps);
    const Cached a = cache_answers(first, queries);
    const Cached b = cache_answers(second, queries);
    const Cached c = cache_answers(third, queries);
    std::vector<TunePoint> table;
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; i + j <= steps; ++j) {
            MixtureWeights w;
            w.lambda1 = double(i) / double(steps);
            w.lambda2 = double(j) / double(steps);
            table.push_back(measure_point(queries, w, [&](size_t q) {
                return interpolate3(a[q], b[q], c[q], w.lambda1, w.lambda2);
            }));
        }
    }
    return pick_best(std::move(table), objective);
}

std::string sweep_tsv(const TuneResult& result, bool three_way) {
    std::string out = three_way ? "lambda1\tlambda2\tP@1\tP@10\tR@10\tF1\tMAP\n"
                                : "lambda\tP@1\tP@10\tR@10\tF1\tMAP\n";
    for (const TunePoint& pt : result.table) {
        out += fmt_double(pt.weights.lambda1);
        if (three_way) out += "\t" + fmt_double(pt.weights.lambda2);
        out += "\t" + pct(pt.p1) + "\t" + pct(pt.p10) + "\t" + pct(pt.r10) +
               "\t" + pct(pt.f1) + "\t" + pct(pt.map) + "\n";
    }
    return out;
}

}  // namespace nextword
