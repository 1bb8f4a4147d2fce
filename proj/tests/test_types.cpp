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

#include "doctest.h"
#include "nextword/types.hpp"
#include "nextword/utf8.hpp"

using namespace nextword;

static Distribution dist_of(std::vector<double> probs) {
    Distribution d;
    d.probs = std::move(probs);
    return d;
}

TEST_CASE("top_k ranks by probability then ascending id") {
    // ids: 0 pad, 1 unk, then 4 regular words
    auto d = dist_of({0.0, 0.0, 0.1, 0.4, 0.1, 0.4});
    auto top = top_k(d, 3);
    REQUIRE(top.size() == 3);
    CHECK(top.items[0] == std::pair<WordId, double>{3, 0.4});
    CHECK(top.items[1] == std::pair<WordId, double>{5, 0.4});
    CHECK(top.items[2] == std::pair<WordId, double>{2, 0.1});
    CHECK(top.contains(5));
    CHECK(!top.contains(4));
}

TEST_CASE("top_k never pads with zero-probability words") {
    auto d = dist_of({0.0, 0.0, 0.0, 1.0, 0.0, 0.0});
    auto top = top_k(d, 10);
    REQUIRE(top.size() == 1);
    CHECK(top.items[0].first == 3);
}

TEST_CASE("top_k rejects empty distributions and bad K") {
    auto zero = dist_of({0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(top_k(zero, 5), EmptyDistribution);
    auto ok = dist_of({0.0, 0.0, 1.0});
    CHECK_THROWS_AS(top_k(ok, 0), UsageError);
}

TEST_CASE("full_rank walks the same deterministic order as top_k") {
    auto d = dist_of({0.0, 0.0, 0.1, 0.4, 0.1, 0.4});
    CHECK(full_rank(d, 3) == 1);
    CHECK(full_rank(d, 5) == 2);
    CHECK(full_rank(d, 2) == 3);
    CHECK(full_rank(d, 4) == 4);
}

TEST_CASE("mask_reserved_and_normalize zeroes reserved slots") {
    auto d = dist_of({0.25, 0.25, 0.25, 0.25});
    d.mask_reserved_and_normalize();
    CHECK(d.probs[kPadId] == 0.0);
    CHECK(d.probs[kUnkId] == 0.0);
    CHECK(d.probs[2] == doctest::Approx(0.5));
    CHECK(d.sum() == doctest::Approx(1.0));

    auto reserved_only = dist_of({0.5, 0.5, 0.0, 0.0});
    CHECK_THROWS_AS(reserved_only.mask_reserved_and_normalize(), EmptyDistribution);
}

TEST_CASE("check_context rejects out-of-range ids") {
    CHECK_NOTHROW(check_context({0, 1, 2, 3}, 4));
    CHECK_THROWS_AS(check_context({4}, 4), VocabularyMismatch);
    CHECK_THROWS_AS(check_context({-1}, 4), VocabularyMismatch);
}

TEST_CASE("utf8 scalar counting and classification") {
    CHECK(utf8::length("abc") == 3);
    CHECK(utf8::length("你好") == 2);
    CHECK(utf8::length("") == 0);
    CHECK(utf8::length("a你1") == 3);
    CHECK(utf8::all_digits("0123"));
    CHECK(utf8::all_digits("１２３"));  // full-width digits
    CHECK(!utf8::all_digits("12a"));
    CHECK(!utf8::all_digits(""));
    CHECK(utf8::all_ascii_letters("hello"));
    CHECK(!utf8::all_ascii_letters("hell0"));
    CHECK(!utf8::all_ascii_letters("你"));
    // Malformed bytes count one scalar each and never crash.
    std::string bad = "\xff\xfe";
    CHECK(utf8::length(bad) == 2);
}
