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

#include "nextword/ngram.hpp"

#include <algorithm>

#include "nextword/io.hpp"

namespace nextword {

NGramTable::NGramTable(int order, size_t vocab_size)
    : order_(order), vocab_size_(vocab_size) {
    if (order < 1) throw UsageError("n-gram order must be >= 1");
    nodes_.emplace_back();
}

int32_t NGramTable::child_of(int32_t node, WordId w) {
    auto it = nodes_[node].children.find(w);
    if (it != nodes_[node].children.end()) return it->second;
    int32_t fresh = static_cast<int32_t>(nodes_.size());
    nodes_[node].children.emplace(w, fresh);
    nodes_.emplace_back();
    return fresh;
}

void NGramTable::add_sequence(const std::vector<WordId>& words) {
    if (frozen_) throw UsageError("cannot add to a frozen n-gram table");
    std::vector<WordId> padded(order_ - 1, kPadId);
    padded.insert(padded.end(), words.begin(), words.end());
    // One n-gram of every order ends at each real-word position; walking the
    // context backwards hits the node for each order along a single path.
    for (size_t i = order_ - 1; i < padded.size(); ++i) {
        WordId w = padded[i];
        int32_t node = 0;
        for (int n = 1; n <= order_; ++n) {
            nodes_[node].followers[w] += 1;
            nodes_[node].total += 1;
            if (n < order_) node = child_of(node, padded[i - n]);
        }
    }
}

void NGramTable::set_gram_count(const std::vector<WordId>& gram, int64_t count) {
    if (frozen_) throw UsageError("cannot add to a frozen n-gram table");
    if (gram.empty() || static_cast<int>(gram.size()) > order_ || count < 1) {
        throw DataError("malformed n-gram entry");
    }
    int32_t node = 0;
    for (size_t k = 1; k < gram.size(); ++k) {
        node = child_of(node, gram[gram.size() - 1 - k]);
    }
    auto [it, fresh] = nodes_[node].followers.emplace(gram.back(), count);
    (void)it;
    if (!fresh) throw DataError("duplicate n-gram entry");
    nodes_[node].total += count;
}

void NGramTable::freeze() {
    if (frozen_) return;
    // Left-extending a context by a non-pad word contributes that node's
    // followers to the parent's continuation counts. Children are created
    // before their parents gain more children, so index order is topological.
    for (size_t p = 0; p < nodes_.size(); ++p) {
        for (const auto& [left, child] : nodes_[p].children) {
            if (left == kPadId) continue;
            for (const auto& [w, count] : nodes_[child].followers) {
                (void)count;
                nodes_[p].cont[w] += 1;
                nodes_[p].cont_total += 1;
            }
        }
    }
    frozen_ = true;
}

NGramTable NGramTable::count(const RawCorpus& train, const Vocabulary& vocab, int order) {
    NGramTable t(order, vocab.size());
    for (const auto& seq : train.sequences) {
        if (seq.empty()) continue;
        t.add_sequence(vocab.encode(seq));
    }
    t.freeze();
    return t;
}

int64_t NGramTable::gram_count(const std::vector<WordId>& gram) const {
    if (gram.empty() || static_cast<int>(gram.size()) > order_) return 0;
    Context ctx(gram.begin(), gram.end() - 1);
    std::vector<const Node*> path;
    const Node* node = find_context(ctx, static_cast<int>(ctx.size()), &path);
    if (path.size() != ctx.size() + 1) return 0;  // context itself unseen
    auto it = node->followers.find(gram.back());
    return it == node->followers.end() ? 0 : it->second;
}

const NGramTable::Node* NGramTable::find_context(
    const Context& ctx, int max_len, std::vector<const Node*>* path_out) const {
    int limit = std::min<int>(max_len, static_cast<int>(ctx.size()));
    const Node* node = &nodes_[0];
    if (path_out) {
        path_out->clear();
        path_out->push_back(node);
    }
    for (int k = 1; k <= limit; ++k) {
        WordId w = ctx[ctx.size() - k];
        auto it = node->children.find(w);
        if (it == node->children.end()) break;
        node = &nodes_[it->second];
        if (path_out) path_out->push_back(node);
    }
    return node;
}

int64_t NGramTable::grams_with_count(int n, int64_t c) const {
    // Depth-first over contexts of length n-1, counting matching followers.
    int64_t hits = 0;
    std::function<void(int32_t, int)> walk = [&](int32_t node, int depth) {
        if (depth == n - 1) {
            for (const auto& [w, count] : nodes_[node].followers) {
                (void)w;
                if (count == c) ++hits;
            }
            return;
        }
        for (const auto& [w, child] : nodes_[node].children) {
            (void)w;
            walk(child, depth + 1);
        }
    };
    walk(0, 0);
    return hits;
}

void NGramTable::for_each_gram(
    const std::function<void(const std::vector<WordId>&, int64_t)>& fn) const {
    std::vector<std::pair<std::vector<WordId>, int64_t>> grams;
    std::vector<WordId> rev_ctx;  // newest first, as stored on the path
    std::function<void(int32_t)> walk = [&](int32_t node) {
        for (const auto& [w, count] : nodes_[node].followers) {
            std::vector<WordId> gram(rev_ctx.rbegin(), rev_ctx.rend());
            gram.push_back(w);
            grams.emplace_back(std::move(gram), count);
        }
        for (const auto& [w, child] : nodes_[node].children) {
            rev_ctx.push_back(w);
            walk(child);
            rev_ctx.pop_back();
        }
    };
    walk(0);
    std::sort(grams.begin(), grams.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });
    for (const auto& [gram, count] : grams) fn(gram, count);
}

KNDiscounts estimate_discounts(const NGramTable& table) {
    KNDiscounts d;
    d.d.assign(table.order() + 1, 0.0);
    for (int n = 2; n <= table.order(); ++n) {
        int64_t n1 = table.grams_with_count(n, 1);
        int64_t n2 = table.grams_with_count(n, 2);
        d.d[n] = (n1 + 2 * n2) > 0 ? static_cast<double>(n1) / (n1 + 2.0 * n2) : 0.5;
    }
    return d;
}

std::vector<double> mle_distribution_raw(const NGramTable& table, const Context& ctx,
                                         int* matched_depth) {
    std::vector<const NGramTable::Node*> path;
    table.find_context(ctx, table.order() - 1, &path);
    std::vector<double> p(table.vocab_size(), 0.0);
    for (int k = static_cast<int>(path.size()) - 1; k >= 1; --k) {
        const auto* node = path[k];
        if (node->total == 0) continue;
        for (const auto& [w, count] : node->followers) {
            p[w] = static_cast<double>(count) / static_cast<double>(node->total);
        }
        if (matched_depth) *matched_depth = k;
        return p;
    }
    if (matched_depth) *matched_depth = 0;
    return {};
}

double prob_mle(const NGramTable& table, const Context& ctx, WordId w) {
    auto p = mle_distribution_raw(table, ctx);
    if (p.empty() || w < 0 || static_cast<size_t>(w) >= p.size()) return 0.0;
    return p[w];
}

// Continuation-unigram base, optionally floored with a uniform term over the
// recommendable ids so that every one of them keeps nonzero mass.
static std::vector<double> kn_base(const NGramTable& table, const KNDiscounts& d,
                                   bool uniform_floor) {
    size_t v = table.vocab_size();
    std::vector<double> p(v, 0.0);
    int n_rec = static_cast<int>(v) - kFirstRegularId;
    if (n_rec <= 0) return p;
    const auto& root = table.root();
    double big_b = static_cast<double>(root.cont_total);
    if (big_b == 0.0) {
        for (size_t w = kFirstRegularId; w < v; ++w) p[w] = 1.0 / n_rec;
        return p;
    }
    if (!uniform_floor) {
        for (const auto& [w, c] : root.cont) p[w] = static_cast<double>(c) / big_b;
        return p;
    }
    double disc = d.at(2);
    double kept = 0.0;
    for (const auto& [w, c] : root.cont) {
        p[w] = std::max(0.0, static_cast<double>(c) - disc) / big_b;
        kept += p[w];
    }
    double spread = 1.0 - kept;  // = disc * |cont| / B up to clipping
    for (size_t w = kFirstRegularId; w < v; ++w) p[w] += spread / n_rec;
    return p;
}

std::vector<double> kn_distribution_raw(const NGramTable& table, const KNDiscounts& d,
                                        const Context& ctx, bool uniform_floor) {
    if (!table.frozen()) throw UsageError("n-gram table not frozen");
    int top = std::min<int>(static_cast<int>(ctx.size()), table.order() - 1);
    std::vector<const NGramTable::Node*> path;
    table.find_context(ctx, top, &path);

    std::vector<double> p = kn_base(table, d, uniform_floor);
    for (size_t k = 1; k < path.size(); ++k) {
        const auto* node = path[k];
        double disc = d.at(static_cast<int>(k) + 1);
        if (static_cast<int>(k) == top) {
            // Highest order: raw counts.
            double total = static_cast<double>(node->total);
            double lambda = disc * static_cast<double>(node->followers.size()) / total;
            for (auto& x : p) x *= lambda;
            for (const auto& [w, c] : node->followers) {
                p[w] += std::max(0.0, static_cast<double>(c) - disc) / total;
            }
        } else if (node->cont_total > 0) {
            // Lower order: continuation counts.
            double total = static_cast<double>(node->cont_total);
            double lambda = disc * static_cast<double>(node->cont.size()) / total;
            for (auto& x : p) x *= lambda;
            for (const auto& [w, c] : node->cont) {
                p[w] += std::max(0.0, static_cast<double>(c) - disc) / total;
            }
        }
        // A matched context with no continuation statistics passes through.
    }
    return p;
}

double prob_kn(const NGramTable& table, const KNDiscounts& d, const Context& ctx,
               WordId w, bool uniform_floor) {
    if (!table.frozen()) throw UsageError("n-gram table not frozen");
    int top = std::min<int>(static_cast<int>(ctx.size()), table.order() - 1);
    std::vector<const NGramTable::Node*> path;
    table.find_context(ctx, top, &path);

    // Follows the definition literally, one level at a time from the top:
    // unseen levels fall straight through to the next-shorter context.
    std::function<double(int)> level = [&](int k) -> double {
        if (k == 0) {
            const auto& base = kn_base(table, d, uniform_floor);
            return (w >= 0 && static_cast<size_t>(w) < base.size()) ? base[w] : 0.0;
        }
        if (k >= static_cast<int>(path.size())) return level(k - 1);
        const auto* node = path[k];
        double disc = d.at(k + 1);
        if (k == top) {
            double total = static_cast<double>(node->total);
            auto it = node->followers.find(w);
            double hi = it == node->followers.end()
                            ? 0.0
                            : std::max(0.0, static_cast<double>(it->second) - disc) / total;
            double lambda = disc * static_cast<double>(node->followers.size()) / total;
            return hi + lambda * level(k - 1);
        }
        if (node->cont_total == 0) return level(k - 1);
        double total = static_cast<double>(node->cont_total);
        auto it = node->cont.find(w);
        double hi = it == node->cont.end()
                        ? 0.0
                        : std::max(0.0, static_cast<double>(it->second) - disc) / total;
        double lambda = disc * static_cast<double>(node->cont.size()) / total;
        return hi + lambda * level(k - 1);
    };
    return level(top);
}

MleNgramModel::MleNgramModel(Vocabulary vocab, NGramTable table, bool unigram_fallback)
    : vocab_(std::move(vocab)), table_(std::move(table)), unigram_fallback_(unigram_fallback) {
    if (vocab_.size() != table_.vocab_size()) {
        throw VocabularyMismatch("n-gram table built against a different vocabulary");
    }
    table_.freeze();
}

std::optional<Distribution> MleNgramModel::next_distribution(const Context& ctx) const {
    check_context(ctx, vocab_.size());
    int depth = 0;
    auto raw = mle_distribution_raw(table_, ctx, &depth);
    if (depth == 0) {
        if (!unigram_fallback_) return std::nullopt;
        raw.assign(table_.vocab_size(), 0.0);
        const auto& root = table_.root();
        if (root.total == 0) return std::nullopt;
        for (const auto& [w, c] : root.followers) {
            raw[w] = static_cast<double>(c) / static_cast<double>(root.total);
        }
    }
    Distribution dist;
    dist.probs = std::move(raw);
    try {
        dist.mask_reserved_and_normalize();
    } catch (const EmptyDistribution&) {
        return std::nullopt;  // only reserved words followed this context
    }
    return dist;
}

KnNgramModel::KnNgramModel(Vocabulary vocab, NGramTable table, KNDiscounts discounts)
    : vocab_(std::move(vocab)), table_(std::move(table)), discounts_(std::move(discounts)) {
    if (vocab_.size() != table_.vocab_size()) {
        throw VocabularyMismatch("n-gram table built against a different vocabulary");
    }
    table_.freeze();
}

std::optional<Distribution> KnNgramModel::next_distribution(const Context& ctx) const {
    check_context(ctx, vocab_.size());
    Distribution dist;
    dist.probs = kn_distribution_raw(table_, discounts_, ctx, true);
    try {
        dist.mask_reserved_and_normalize();
    } catch (const EmptyDistribution&) {
        return std::nullopt;
    }
    return dist;
}

// --------------------------------------------------------------------------
// Persistence: text header, then one line per n-gram, canonical order.

static std::string render_table(const NGramTable& table) {
    std::string body;
    int64_t lines = 0;
    table.for_each_gram([&](const std::vector<WordId>& gram, int64_t count) {
        body += std::to_string(gram.size());
        body += '\t';
        for (size_t i = 0; i < gram.size(); ++i) {
            if (i) body += ' ';
            body += std::to_string(gram[i]);
        }
        body += '\t';
        body += std::to_string(count);
        body += '\n';
        ++lines;
    });
    return "ngrams " + std::to_string(lines) + "\n" + body;
}

void MleNgramModel::save(const std::string& path) const {
    std::string out = "nextword-ngram v1\nkind ngram\norder " +
                      std::to_string(table_.order()) + "\nvocab " +
                      std::to_string(table_.vocab_size()) + "\nunigram_fallback " +
                      std::string(unigram_fallback_ ? "1" : "0") + "\n";
    out += render_table(table_);
    atomic_write(path, out);
}

void KnNgramModel::save(const std::string& path) const {
    std::string out = "nextword-ngram v1\nkind ngram-kn\norder " +
                      std::to_string(table_.order()) + "\nvocab " +
                      std::to_string(table_.vocab_size()) + "\n";
    for (int n = 2; n <= table_.order(); ++n) {
        out += "discount " + std::to_string(n) + " " + fmt_double(discounts_.at(n)) + "\n";
    }
    out += render_table(table_);
    atomic_write(path, out);
}

std::unique_ptr<LanguageModel> load_ngram_model(const std::string& path,
                                                const Vocabulary& vocab) {
    auto lines = read_lines(path);
    size_t i = 0;
    auto next = [&]() -> const std::string& {
        if (i >= lines.size()) throw DataError("truncated n-gram model file: " + path);
        return lines[i++];
    };
    if (next() != "nextword-ngram v1") throw DataError("not an n-gram model file: " + path);

    std::string kind;
    int order = 0;
    size_t vocab_size = 0;
    bool unigram_fallback = false;
    KNDiscounts d;
    int64_t expected = -1;
    while (expected < 0) {
        auto fields = split_ws(next());
        if (fields.empty()) throw DataError("bad n-gram header: " + path);
        if (fields[0] == "kind" && fields.size() == 2) {
            kind = fields[1];
        } else if (fields[0] == "order" && fields.size() == 2) {
            order = static_cast<int>(parse_int(fields[1]));
        } else if (fields[0] == "vocab" && fields.size() == 2) {
            vocab_size = static_cast<size_t>(parse_int(fields[1]));
        } else if (fields[0] == "unigram_fallback" && fields.size() == 2) {
            unigram_fallback = parse_int(fields[1]) != 0;
        } else if (fields[0] == "discount" && fields.size() == 3) {
            int n = static_cast<int>(parse_int(fields[1]));
            if (static_cast<int>(d.d.size()) <= n) d.d.resize(n + 1, 0.0);
            d.d[n] = parse_double(fields[2]);
        } else if (fields[0] == "ngrams" && fields.size() == 2) {
            expected = parse_int(fields[1]);
        } else {
            throw DataError("unknown n-gram header line: '" + lines[i - 1] + "'");
        }
    }
    if (order < 1 || vocab_size < 2) throw DataError("bad n-gram header: " + path);
    if (vocab.size() != vocab_size) {
        throw VocabularyMismatch("model expects vocabulary of " +
                                 std::to_string(vocab_size) + " words, got " +
                                 std::to_string(vocab.size()));
    }

    NGramTable table(order, vocab_size);
    for (int64_t g = 0; g < expected; ++g) {
        auto cols = split_tab(next());
        if (cols.size() != 3) throw DataError("bad n-gram line in " + path);
        int n = static_cast<int>(parse_int(cols[0]));
        std::vector<WordId> gram;
        for (const auto& tok : split_ws(cols[1])) {
            int64_t id = parse_int(tok);
            if (id < 0 || static_cast<size_t>(id) >= vocab_size) {
                throw DataError("word id out of range in " + path);
            }
            gram.push_back(static_cast<WordId>(id));
        }
        if (static_cast<int>(gram.size()) != n || n < 1 || n > order) {
            throw DataError("inconsistent n-gram length in " + path);
        }
        table.set_gram_count(gram, parse_int(cols[2]));
    }
    table.freeze();

    if (kind == "ngram") {
        return std::make_unique<MleNgramModel>(vocab, std::move(table), unigram_fallback);
    }
    if (kind == "ngram-kn") {
        d.d.resize(order + 1, 0.0);
        return std::make_unique<KnNgramModel>(vocab, std::move(table), std::move(d));
    }
    throw DataError("unknown n-gram model kind '" + kind + "' in " + path);
}

}  // namespace nextword
