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

#include <cmath>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nextword/eval.hpp"
#include "nextword/hybrid.hpp"
#include "nextword/io.hpp"
#include "nextword/ngram.hpp"
#include "nextword/numeric.hpp"
#include "support/helpers.hpp"

using namespace nextword;
using testhelp::corpus_of;
using testhelp::make_q;
using testhelp::ScriptedModel;

namespace {

bool same_doubles(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

Distribution dist_of(size_t size, const std::vector<std::pair<WordId, double>>& probs) {
    Distribution d(size);
    for (const auto& [w, p] : probs) d.probs[w] = p;
    return d;
}

// Vocabulary with a=2, b=3, c=4, d=5 (strictly descending frequency).
Vocabulary abcd_vocab() {
    return Vocabulary::build(corpus_of({"a a a a b b b c c d"}).sequences, 1);
}

}  // namespace

TEST_CASE("interpolate2: pointwise mix, endpoints, weight checks") {
    const size_t n = 6;
    auto p = dist_of(n, {{2, 0.5}, {3, 0.3}, {4, 0.2}});
    auto q = dist_of(n, {{3, 0.6}, {5, 0.4}});

    auto out = interpolate2(p, q, 0.25);
    REQUIRE(out.has_value());
    CHECK(out->probs[2] == 0.25 * 0.5);
    CHECK(out->probs[3] == 0.25 * 0.3 + 0.75 * 0.6);
    CHECK(out->probs[4] == 0.25 * 0.2);
    CHECK(out->probs[5] == 0.75 * 0.4);
    CHECK(out->sum() == doctest::Approx(1.0).epsilon(1e-12));

    // Endpoints return the input distribution bit for bit, even with
    // non-terminating binary fractions inside.
    auto messy1 = dist_of(n, {{2, 1.0 / 3.0}, {4, 2.0 / 3.0}});
    auto messy2 = dist_of(n, {{3, 1.0 / 7.0}, {5, 6.0 / 7.0}});
    auto at1 = interpolate2(messy1, messy2, 1.0);
    auto at0 = interpolate2(messy1, messy2, 0.0);
    REQUIRE(at1.has_value());
    REQUIRE(at0.has_value());
    CHECK(same_doubles(at1->probs, messy1.probs));
    CHECK(same_doubles(at0->probs, messy2.probs));

    CHECK_THROWS_AS((void)interpolate2(p, q, -0.1), WeightOutOfRange);
    CHECK_THROWS_AS((void)interpolate2(p, q, 1.1), WeightOutOfRange);
    CHECK_THROWS_AS((void)interpolate2(p, q, std::nan("")), WeightOutOfRange);

    auto small = dist_of(4, {{2, 1.0}});
    CHECK_THROWS_AS((void)interpolate2(p, small, 0.5), VocabularyMismatch);
}

TEST_CASE("interpolate2: a declined side drops out unscaled") {
    const size_t n = 6;
    auto p = dist_of(n, {{2, 1.0 / 3.0}, {3, 2.0 / 3.0}});
    std::optional<Distribution> none;

    // Whatever lambda says, the only answer wins and is not rescaled.
    for (double lambda : {0.0, 0.3, 1.0}) {
        auto only_first = interpolate2(p, none, lambda);
        REQUIRE(only_first.has_value());
        CHECK(same_doubles(only_first->probs, p.probs));
        auto only_second = interpolate2(none, p, lambda);
        REQUIRE(only_second.has_value());
        CHECK(same_doubles(only_second->probs, p.probs));
    }
    CHECK_FALSE(interpolate2(none, none, 0.5).has_value());
}

TEST_CASE("interpolate3: three point masses land on the stated weights") {
    auto v = abcd_vocab();
    const size_t n = v.size();
    auto pa = dist_of(n, {{2, 1.0}});
    auto pb = dist_of(n, {{3, 1.0}});
    auto pc = dist_of(n, {{4, 1.0}});

    auto out = interpolate3(pa, pb, pc, 0.3, 0.2);
    REQUIRE(out.has_value());
    CHECK(out->probs[2] == 0.3);
    CHECK(out->probs[3] == 0.2);
    CHECK(out->probs[4] == 1.0 - 0.3 - 0.2);  // the implied third weight
    CHECK(out->probs[4] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out->sum() == 1.0);

    CHECK_THROWS_AS((void)interpolate3(pa, pb, pc, -0.1, 0.5), WeightOutOfRange);
    CHECK_THROWS_AS((void)interpolate3(pa, pb, pc, 0.5, -0.1), WeightOutOfRange);
    CHECK_THROWS_AS((void)interpolate3(pa, pb, pc, 0.7, 0.5), WeightOutOfRange);
    CHECK_NOTHROW((void)interpolate3(pa, pb, pc, 0.5, 0.5));
}

TEST_CASE("interpolate3: declined components drop out and weights renormalize") {
    auto v = abcd_vocab();
    const size_t n = v.size();
    auto pa = dist_of(n, {{2, 1.0}});
    auto pc = dist_of(n, {{4, 1.0}});
    std::optional<Distribution> none;

    // Middle component silent: 0.3 and 0.5 renormalize over 0.8, landing on
    // exactly 3/8 and 5/8.
    auto out = interpolate3(pa, none, pc, 0.3, 0.2);
    REQUIRE(out.has_value());
    CHECK(out->probs[2] == 0.375);
    CHECK(out->probs[4] == 0.625);
    CHECK(out->sum() == doctest::Approx(1.0).epsilon(1e-12));

    // A single answer comes back unscaled even when its nominal weight is 0.
    auto messy = dist_of(n, {{2, 1.0 / 3.0}, {5, 2.0 / 3.0}});
    auto solo = interpolate3(none, messy, none, 0.9, 0.0);
    REQUIRE(solo.has_value());
    CHECK(same_doubles(solo->probs, messy.probs));

    // Everyone with weight declined: the present pair splits evenly.
    auto pb = dist_of(n, {{3, 1.0}});
    auto even = interpolate3(pa, pb, none, 0.0, 0.0);
    REQUIRE(even.has_value());
    CHECK(even->probs[2] == 0.5);
    CHECK(even->probs[3] == 0.5);

    CHECK_FALSE(interpolate3(none, none, none, 0.3, 0.2).has_value());
}

TEST_CASE("mixing keeps distributions normalized and non-negative") {
    Rng rng(511);
    const size_t n = 30;
    auto random_dist = [&] {
        Distribution d(n);
        double total = 0.0;
        for (size_t w = kFirstRegularId; w < n; ++w) {
            d.probs[w] = rng.uniform();
            total += d.probs[w];
        }
        for (size_t w = kFirstRegularId; w < n; ++w) d.probs[w] /= total;
        return d;
    };
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_dist();
        auto q = random_dist();
        auto r = random_dist();
        double lambda = rng.uniform();
        auto two = interpolate2(p, q, lambda);
        REQUIRE(two.has_value());
        CHECK(two->sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (double x : two->probs) CHECK(x >= 0.0);

        double l1 = rng.uniform();
        double l2 = (1.0 - l1) * rng.uniform();
        auto three = interpolate3(p, q, r, l1, l2);
        REQUIRE(three.has_value());
        CHECK(three->sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (double x : three->probs) CHECK(x >= 0.0);
    }
}

TEST_CASE("mixing a distribution with itself cannot change the ranking") {
    auto c = corpus_of({"p q r", "q r p", "r p q", "p q p"});
    auto v = Vocabulary::build(c.sequences, 1);
    auto table = NGramTable::count(c, v, 2);
    KnNgramModel kn(v, table, estimate_discounts(table));

    auto p = kn.next_distribution({v.id_of("p")});
    REQUIRE(p.has_value());
    auto mixed = interpolate2(p, p, 0.4);
    REQUIRE(mixed.has_value());
    auto want = top_k(*p, 10);
    auto got = top_k(*mixed, 10);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        CHECK(got.items[i].first == want.items[i].first);
    }
}

TEST_CASE("hybrid model: forwarding, vocabulary checks, construction errors") {
    auto c = corpus_of({"p q r", "q r p", "r p q", "p q p"});
    auto v = Vocabulary::build(c.sequences, 1);
    auto table = NGramTable::count(c, v, 2);
    KnNgramModel kn(v, table, estimate_discounts(table));
    MleNgramModel mle(v, table, false);

    MixtureWeights w;
    w.lambda1 = 0.6;
    HybridModel hybrid({&kn, &mle}, w);
    CHECK(hybrid.kind() == "hybrid");
    CHECK(hybrid.component_count() == 2);
    CHECK(hybrid.vocabulary() == v);

    Context ctx = {v.id_of("p")};
    auto got = hybrid.next_distribution(ctx);
    auto want = interpolate2(kn.next_distribution(ctx), mle.next_distribution(ctx), 0.6);
    REQUIRE(got.has_value());
    REQUIRE(want.has_value());
    CHECK(same_doubles(got->probs, want->probs));

    // Three-way forwarding against the free function.
    auto table1 = NGramTable::count(c, v, 1);
    KnNgramModel uni(v, table1, estimate_discounts(table1));
    MixtureWeights w3;
    w3.lambda1 = 0.3;
    w3.lambda2 = 0.2;
    HybridModel hybrid3({&kn, &mle, &uni}, w3);
    auto got3 = hybrid3.next_distribution(ctx);
    auto want3 = interpolate3(kn.next_distribution(ctx), mle.next_distribution(ctx),
                              uni.next_distribution(ctx), 0.3, 0.2);
    REQUIRE(got3.has_value());
    REQUIRE(want3.has_value());
    CHECK(same_doubles(got3->probs, want3->probs));

    CHECK_THROWS_AS(HybridModel({&kn}, w), UsageError);
    CHECK_THROWS_AS(HybridModel({&kn, &mle, &uni, &kn}, w), UsageError);
    CHECK_THROWS_AS(HybridModel({&kn, nullptr}, w), UsageError);

    auto other_vocab = abcd_vocab();
    ScriptedModel stranger(other_vocab);
    CHECK_THROWS_AS(HybridModel({&kn, &stranger}, w), VocabularyMismatch);

    MixtureWeights bad;
    bad.lambda1 = 1.5;
    CHECK_THROWS_AS(HybridModel({&kn, &mle}, bad), WeightOutOfRange);
    MixtureWeights bad3;
    bad3.lambda1 = 0.7;
    bad3.lambda2 = 0.5;
    CHECK_THROWS_AS(HybridModel({&kn, &mle, &uni}, bad3), WeightOutOfRange);
}

TEST_CASE("hybrid model declines only when every component declines") {
    auto v = abcd_vocab();
    ScriptedModel quiet1(v), quiet2(v), talker(v);
    talker.answer({2}, {{3, 1.0}});

    MixtureWeights w;
    w.lambda1 = 0.5;
    HybridModel silent({&quiet1, &quiet2}, w);
    CHECK_FALSE(silent.next_distribution({2}).has_value());

    HybridModel half({&talker, &quiet1}, w);
    auto got = half.next_distribution({2});
    REQUIRE(got.has_value());
    CHECK(got->probs[3] == 1.0);
}

TEST_CASE("tune_lambda2: an interior mixture can beat both pure models") {
    auto v = abcd_vocab();
    WordId a = v.id_of("a"), b = v.id_of("b"), c = v.id_of("c");
    ScriptedModel first(v), second(v);
    first.answer({a}, {{b, 1.0}});
    second.answer({a}, {{c, 1.0}});
    std::vector<EvalQuery> qs = {make_q({"a"}, {a}, {{b, 1}, {c, 1}})};

    auto r = tune_lambda2(first, second, qs);
    REQUIRE(r.table.size() == 11);
    for (int k = 0; k <= 10; ++k) CHECK(r.table[k].weights.lambda1 == k / 10.0);

    // Pure models see one truth in the list and the other at nominal rank 3;
    // any interior mixture supports both truths at ranks one and two.
    CHECK(r.table[0].map == (1.0 / 3.0 + 1.0) / 2.0);
    CHECK(r.table[10].map == (1.0 + 1.0 / 3.0) / 2.0);
    CHECK(r.table[5].map == 0.75);
    CHECK(r.table[0].r10 == 0.5);
    CHECK(r.table[5].r10 == 1.0);

    // All interior points tie at 0.75, so the smallest interior lambda wins.
    CHECK(r.best.lambda1 == 0.1);
    CHECK(r.best_index == 1);
    CHECK(r.table[r.best_index].map > r.table[0].map);
    CHECK(r.table[r.best_index].map > r.table[10].map);
}

TEST_CASE("tune_lambda2: ties go to the smaller lambda") {
    auto v = abcd_vocab();
    WordId a = v.id_of("a"), b = v.id_of("b");
    ScriptedModel twin1(v), twin2(v);
    twin1.answer({a}, {{b, 1.0}});
    twin2.answer({a}, {{b, 1.0}});
    std::vector<EvalQuery> qs = {make_q({"a"}, {a}, {{b, 1}})};

    auto r = tune_lambda2(twin1, twin2, qs);
    CHECK(r.best.lambda1 == 0.0);
    CHECK(r.best_index == 0);
    for (const auto& pt : r.table) CHECK(pt.map == r.table[0].map);
}

TEST_CASE("tune_lambda2 equals evaluating each grid mixture from scratch") {
    // Random bigram world; the raw-count model declines unseen contexts, so
    // the drop-out path is exercised inside the sweep.
    auto random_corpus = [](int lines, int seed_shift) {
        Rng local(903 + seed_shift);
        RawCorpus c;
        const char* words[] = {"w0", "w1", "w2", "w3", "w4",  "w5",
                               "w6", "w7", "w8", "w9", "w10", "w11"};
        for (int i = 0; i < lines; ++i) {
            std::vector<std::string> seq;
            size_t len = 3 + local.below(6);
            for (size_t j = 0; j < len; ++j) seq.push_back(words[local.below(12)]);
            c.sequences.push_back(std::move(seq));
        }
        return c;
    };
    auto train = random_corpus(20, 0);
    auto test = random_corpus(10, 1);
    // Contexts ending in an out-of-vocabulary word have no matching suffix at
    // all, which is the one spot a backoff-free count model stays silent.
    test.sequences.push_back({"w0", "zzz", "w1"});
    test.sequences.push_back({"w5", "qqq", "w2"});
    auto v = Vocabulary::build(train.sequences, 1);
    auto table = NGramTable::count(train, v, 3);
    KnNgramModel kn(v, table, estimate_discounts(table));
    MleNgramModel mle(v, table, false);
    auto qs = make_queries(test, v);
    REQUIRE(!qs.empty());

    auto r = tune_lambda2(kn, mle, qs);
    REQUIRE(r.table.size() == 11);
    bool mle_declined_somewhere = false;
    for (const auto& q : qs) {
        if (!mle.next_distribution(q.context).has_value()) mle_declined_somewhere = true;
    }
    CHECK(mle_declined_somewhere);

    for (int k = 0; k <= 10; ++k) {
        MixtureWeights w;
        w.lambda1 = k / 10.0;
        HybridModel h({&kn, &mle}, w);
        auto m = evaluate_model(h, qs);
        CHECK(r.table[k].p1 == m.p1);
        CHECK(r.table[k].p10 == m.p10);
        CHECK(r.table[k].r10 == m.r10);
        CHECK(r.table[k].f1 == m.f1);
        CHECK(r.table[k].map == m.map);
    }

    // The smoothed model answers everything, so the lambda = 1 grid point is
    // exactly the smoothed model evaluated on its own.
    auto pure = evaluate_model(kn, qs);
    CHECK(r.table[10].map == pure.map);
    CHECK(r.table[10].p10 == pure.p10);

    // The winner can never fall below either endpoint.
    auto obj = TuneObjective::kMap;
    CHECK(r.table[r.best_index].metric(obj) >= r.table[0].metric(obj));
    CHECK(r.table[r.best_index].metric(obj) >= r.table[10].metric(obj));
}

TEST_CASE("tune_lambda3: simplex sweep order and lexicographic ties") {
    auto v = abcd_vocab();
    WordId a = v.id_of("a"), b = v.id_of("b"), c = v.id_of("c"), d = v.id_of("d");
    ScriptedModel fa(v), fb(v), fc(v);
    fa.answer({d}, {{a, 1.0}});
    fb.answer({d}, {{b, 1.0}});
    fc.answer({d}, {{c, 1.0}});
    std::vector<EvalQuery> qs = {make_q({"d"}, {d}, {{a, 1}, {b, 1}, {c, 1}})};

    auto r = tune_lambda3(fa, fb, fc, qs, TuneObjective::kRecallAt10);
    CHECK(r.table.size() == 66);  // 11 + 10 + ... + 1 grid points
    CHECK(r.table[0].weights.lambda1 == 0.0);
    CHECK(r.table[0].weights.lambda2 == 0.0);
    CHECK(r.table[1].weights.lambda2 == 0.1);
    CHECK(r.table[11].weights.lambda1 == 0.1);
    CHECK(r.table[11].weights.lambda2 == 0.0);

    // Corners support one specialist, edges two, interior all three; recall
    // maxes out on the whole interior, so the first interior pair wins.
    CHECK(r.table[0].r10 == 1.0 / 3.0);
    CHECK(r.table[1].r10 == 2.0 / 3.0);
    CHECK(r.best.lambda1 == 0.1);
    CHECK(r.best.lambda2 == 0.1);
    CHECK(r.table[r.best_index].r10 == 1.0);
}

TEST_CASE("tuning objectives select their own metric") {
    TunePoint pt;
    pt.p1 = 0.1;
    pt.p10 = 0.2;
    pt.r10 = 0.3;
    pt.f1 = 0.4;
    pt.map = 0.5;
    CHECK(pt.metric(TuneObjective::kPrecisionAt1) == 0.1);
    CHECK(pt.metric(TuneObjective::kRecallAt10) == 0.3);
    CHECK(pt.metric(TuneObjective::kF1) == 0.4);
    CHECK(pt.metric(TuneObjective::kMap) == 0.5);

    CHECK(parse_objective("MAP") == TuneObjective::kMap);
    CHECK(parse_objective("map") == TuneObjective::kMap);
    CHECK(parse_objective("P@1") == TuneObjective::kPrecisionAt1);
    CHECK(parse_objective("R@10") == TuneObjective::kRecallAt10);
    CHECK(parse_objective("F1") == TuneObjective::kF1);
    CHECK(parse_objective("f1") == TuneObjective::kF1);
    CHECK_THROWS_AS((void)parse_objective("BLEU"), UsageError);
    for (auto obj : {TuneObjective::kMap, TuneObjective::kPrecisionAt1,
                     TuneObjective::kRecallAt10, TuneObjective::kF1}) {
        CHECK(parse_objective(std::string(objective_name(obj))) == obj);
    }
}

TEST_CASE("tuning input validation") {
    auto v = abcd_vocab();
    ScriptedModel quiet1(v), quiet2(v);
    std::vector<EvalQuery> none;
    CHECK_THROWS_AS((void)tune_lambda2(quiet1, quiet2, none), EmptyValidationSet);

    std::vector<EvalQuery> qs = {make_q({"a"}, {2}, {{3, 1}})};
    CHECK_THROWS_AS((void)tune_lambda2(quiet1, quiet2, qs, TuneObjective::kMap, 0),
                    UsageError);
    // Nobody answers anything: no grid point has a usable query.
    CHECK_THROWS_AS((void)tune_lambda2(quiet1, quiet2, qs), NoUsableQueries);
    CHECK_THROWS_AS((void)tune_lambda3(quiet1, quiet2, quiet1, qs), NoUsableQueries);
}

TEST_CASE("sweep_tsv lays out the table with percent metrics") {
    auto v = abcd_vocab();
    WordId a = v.id_of("a"), b = v.id_of("b"), c = v.id_of("c");
    ScriptedModel first(v), second(v);
    first.answer({a}, {{b, 1.0}});
    second.answer({a}, {{c, 1.0}});
    std::vector<EvalQuery> qs = {make_q({"a"}, {a}, {{b, 1}, {c, 1}})};

    auto r2 = tune_lambda2(first, second, qs);
    auto tsv = sweep_tsv(r2, false);
    auto lines = split_lines(tsv);
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "lambda\tP@1\tP@10\tR@10\tF1\tMAP");
    auto row0 = split_tab(lines[1]);
    REQUIRE(row0.size() == 6);
    CHECK(row0[0] == "0");
    CHECK(row0[5] == pct((1.0 / 3.0 + 1.0) / 2.0));
    auto row5 = split_tab(lines[6]);
    CHECK(row5[0] == "0.5");
    CHECK(row5[3] == "100.000");  // R@10 of the mixed model
    for (size_t i = 1; i < row5.size(); ++i) (void)parse_double(row5[i]);

    ScriptedModel third(v);
    third.answer({a}, {{v.id_of("d"), 1.0}});
    auto r3 = tune_lambda3(first, second, third, qs);
    auto tsv3 = sweep_tsv(r3, true);
    auto lines3 = split_lines(tsv3);
    REQUIRE(lines3.size() == 67);
    CHECK(lines3[0] == "lambda1\tlambda2\tP@1\tP@10\tR@10\tF1\tMAP");
    auto first_row = split_tab(lines3[1]);
    REQUIRE(first_row.size() == 7);
    CHECK(first_row[0] == "0");
    CHECK(first_row[1] == "0");
}
