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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nextword/corpus.hpp"
#include "nextword/types.hpp"

namespace nextword {

// Pointwise mixture of two distributions: lambda * neural + (1 - lambda) *
// count-based. If exactly one input declines, the other is returned as-is
// (unscaled); if both decline, the mixture declines. lambda in [0, 1], else
// WeightOutOfRange. The endpoints return the corresponding input unchanged.
std::optional<Distribution> interpolate2(const std::optional<Distribution>& first,
                                         const std::optional<Distribution>& second,
                                         double lambda);

// Three-way mixture with weights lambda1 (first), lambda2 (second) and
// 1 - lambda1 - lambda2 (third). Requires lambda1, lambda2 >= 0 and
// lambda1 + lambda2 <= 1, else WeightOutOfRange. Components that decline
// drop out and the remaining weights are renormalized; if every present
// component carries zero weight they are mixed equally. All absent means
// the mixture declines.
std::optional<Distribution> interpolate3(const std::optional<Distribution>& first,
                                         const std::optional<Distribution>& second,
                                         const std::optional<Distribution>& third,
                                         double lambda1, double lambda2);

// Validated weight set for a two- or three-component mixture. For two
// components only lambda1 is used.
struct MixtureWeights {
    double lambda1 = 0.5;
    double lambda2 = 0.0;

    // Throws WeightOutOfRange unless the weights fit an n-component mixture.
    void validate(size_t components) const;
};

// A mixture of component models sharing one vocabulary. Non-owning: the
// components must outlive the hybrid. Declines only when every component
// declines.
class HybridModel : public LanguageModel {
public:
    // Accepts two or three components; throws UsageError otherwise and
    // VocabularyMismatch when the component vocabularies differ.
    HybridModel(std::vector<const LanguageModel*> components, MixtureWeights weights);

    std::string_view kind() const override { return "hybrid"; }
    const Vocabulary& vocabulary() const override;
    std::optional<Distribution> next_distribution(const Context& ctx) const override;

    const MixtureWeights& weights() const { return weights_; }
    size_t component_count() const { return components_.size(); }

private:
    std::vector<const LanguageModel*> components_;
    MixtureWeights weights_;
};

// What tuning maximizes on the validation queries.
enum class TuneObjective { kMap, kPrecisionAt1, kRecallAt10, kF1 };

// Parses "MAP", "P@1", "R@10" or "F1" (case as written); UsageError otherwise.
TuneObjective parse_objective(const std::string& name);
std::string_view objective_name(TuneObjective objective);

// One grid point of a tuning sweep with its validation metrics (fractions).
struct TunePoint {
    MixtureWeights weights;
    double p1 = 0.0;
    double p10 = 0.0;
    double r10 = 0.0;
    double f1 = 0.0;
    double map = 0.0;

    double metric(TuneObjective objective) const;
};

struct TuneResult {
    MixtureWeights best;
    size_t best_index = 0;         // into table
    std::vector<TunePoint> table;  // every grid point, sweep order
};

// Grid search over lambda in {0, 1/steps, ..., 1}, maximizing the objective
// on the validation queries. Ties go to the smaller lambda. Component
// distributions are computed once per query and reused across the grid, so
// the result matches evaluating each mixture from scratch. Throws
// EmptyValidationSet when there are no queries and NoUsableQueries when no
// component answers any of them.
TuneResult tune_lambda2(const LanguageModel& first, const LanguageModel& second,
                        const std::vector<EvalQuery>& queries,
                        TuneObjective objective = TuneObjective::kMap, int steps = 10);

// Same over the simplex grid {(i/steps, j/steps) : i + j <= steps}, sweeping
// lambda1 outer and lambda2 inner; ties go to the lexicographically smaller
// pair.
TuneResult tune_lambda3(const LanguageModel& first, const LanguageModel& second,
                        const LanguageModel& third,
                        const std::vector<EvalQuery>& queries,
                        TuneObjective objective = TuneObjective::kMap, int steps = 10);

// Sweep table as TSV: lambda[, lambda2], P@1, P@10, R@10, F1, MAP — metrics
// in percent, three decimals.
std::string sweep_tsv(const TuneResult& result, bool three_way);

}  // namespace nextword
