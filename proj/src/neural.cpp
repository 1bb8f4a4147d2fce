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

#include "nextword/neural.hpp"

#include <algorithm>
#include <cmath>

namespace nextword {

// ---------------------------------------------------------------------------
// Parameter blocks

NLMParams NLMParams::shaped(int vocab, int dim, int window, int hidden) {
    if (vocab < 2 || dim < 1 || window < 1 || hidden < 1) {
        throw UsageError("bad nlm shape");
    }
    NLMParams p;
    p.vocab = vocab;
    p.dim = dim;
    p.window = window;
    p.hidden = hidden;
    p.C = Matrix(vocab, dim);
    p.H = Matrix(hidden, window * dim);
    p.bh = Matrix(hidden, 1);
    p.U = Matrix(vocab, hidden);
    p.W = Matrix(vocab, window * dim);
    p.b = Matrix(vocab, 1);
    return p;
}

std::vector<NamedTensor> NLMParams::tensors() {
    return {{"C", &C}, {"H", &H}, {"bh", &bh}, {"U", &U}, {"W", &W}, {"b", &b}};
}

static void uniform_init(Matrix& m, Rng& rng, double scale) {
    for (auto& x : m.a) x = rng.uniform(-scale, scale);
}

void NLMParams::init(Rng& rng, double scale) {
    uniform_init(C, rng, scale);
    uniform_init(H, rng, scale);
    uniform_init(U, rng, scale);
    uniform_init(W, rng, scale);
    bh.fill(0.0);
    b.fill(0.0);
}

CBOWParams CBOWParams::shaped(int vocab, int dim, int window, int negatives) {
    if (vocab < 2 || dim < 1 || window < 1 || negatives < 1) {
        throw UsageError("bad cbow shape");
    }
    CBOWParams p;
    p.vocab = vocab;
    p.dim = dim;
    p.window = window;
    p.negatives = negatives;
    p.Vin = Matrix(vocab, dim);
    p.Vout = Matrix(vocab, dim);
    return p;
}

std::vector<NamedTensor> CBOWParams::tensors() {
    return {{"Vin", &Vin}, {"Vout", &Vout}};
}

void CBOWParams::init(Rng& rng, double scale) {
    uniform_init(Vin, rng, scale);
    uniform_init(Vout, rng, scale);
}

RNNParams RNNParams::shaped(int vocab, int dim) {
    if (vocab < 2 || dim < 1) throw UsageError("bad rnn shape");
    RNNParams p;
    p.vocab = vocab;
    p.dim = dim;
    p.C = Matrix(vocab, dim);
    p.H = Matrix(dim, dim);
    p.O = Matrix(vocab, dim);
    return p;
}

std::vector<NamedTensor> RNNParams::tensors() {
    return {{"C", &C}, {"H", &H}, {"O", &O}};
}

void RNNParams::init(Rng& rng, double scale) {
    uniform_init(C, rng, scale);
    uniform_init(H, rng, scale);
    uniform_init(O, rng, scale);
}

LSTMParams LSTMParams::shaped(int vocab, int dim, int hidden) {
    if (vocab < 2 || dim < 1 || hidden < 1) throw UsageError("bad lstm shape");
    LSTMParams p;
    p.vocab = vocab;
    p.dim = dim;
    p.hidden = hidden;
    p.C = Matrix(vocab, dim);
    p.Wxi = Matrix(hidden, dim);
    p.Wxf = Matrix(hidden, dim);
    p.Wxc = Matrix(hidden, dim);
    p.Wxo = Matrix(hidden, dim);
    p.Whi = Matrix(hidden, hidden);
    p.Whf = Matrix(hidden, hidden);
    p.Whc = Matrix(hidden, hidden);
    p.Who = Matrix(hidden, hidden);
    p.bi = Matrix(hidden, 1);
    p.bf = Matrix(hidden, 1);
    p.bc = Matrix(hidden, 1);
    p.bo = Matrix(hidden, 1);
    p.O = Matrix(vocab, hidden);
    return p;
}

std::vector<NamedTensor> LSTMParams::tensors() {
    return {{"C", &C},     {"Wxi", &Wxi}, {"Whi", &Whi}, {"bi", &bi},
            {"Wxf", &Wxf}, {"Whf", &Whf}, {"bf", &bf},   {"Wxc", &Wxc},
            {"Whc", &Whc}, {"bc", &bc},   {"Wxo", &Wxo}, {"Who", &Who},
            {"bo", &bo},   {"O", &O}};
}

void LSTMParams::init(Rng& rng, double scale) {
    uniform_init(C, rng, scale);
    uniform_init(Wxi, rng, scale);
    uniform_init(Whi, rng, scale);
    uniform_init(Wxf, rng, scale);
    uniform_init(Whf, rng, scale);
    uniform_init(Wxc, rng, scale);
    uniform_init(Whc, rng, scale);
    uniform_init(Wxo, rng, scale);
    uniform_init(Who, rng, scale);
    uniform_init(O, rng, scale);
    bi.fill(0.0);
    bc.fill(0.0);
    bo.fill(0.0);
    bf.fill(1.0);  // keeps the cell path open early in training
}

// ---------------------------------------------------------------------------
// Shared pieces

// dlogits = softmax - onehot(target) over the recommendable ids; returns the
// negative log-probability of the target.
static double softmax_nll_backward(const std::vector<double>& logits, WordId target,
                                   std::vector<double>& dlogits) {
    auto p = masked_softmax(logits, kFirstRegularId);
    dlogits.assign(logits.size(), 0.0);
    for (size_t i = kFirstRegularId; i < p.size(); ++i) dlogits[i] = p[i];
    dlogits[target] -= 1.0;
    return -std::log(p[target]);
}

static void check_word(WordId w, int vocab) {
    if (w < 0 || w >= vocab) throw VocabularyMismatch("word id out of model range");
}

// ---------------------------------------------------------------------------
// NLM

std::vector<double> nlm_logits(const NLMParams& p, const Context& window_ids) {
    if (static_cast<int>(window_ids.size()) != p.window) {
        throw UsageError("nlm expects exactly its window of context ids");
    }
    std::vector<double> x(static_cast<size_t>(p.window) * p.dim);
    for (int j = 0; j < p.window; ++j) {
        check_word(window_ids[j], p.vocab);
        const double* row = p.C.row(window_ids[j]);
        std::copy(row, row + p.dim, x.begin() + static_cast<size_t>(j) * p.dim);
    }
    std::vector<double> a(p.bh.a);  // hidden pre-activation
    gemv_add(p.H, x.data(), a.data());
    std::vector<double> z(p.hidden);
    for (int i = 0; i < p.hidden; ++i) z[i] = std::tanh(a[i]);
    std::vector<double> y(p.b.a);
    gemv_add(p.W, x.data(), y.data());
    gemv_add(p.U, z.data(), y.data());
    return y;
}

// Oldest first, newest occupying the last embedding block; short contexts
// fill the front with pads.
static Context nlm_window(const Context& ctx, int window) {
    Context w(window, kPadId);
    int take = std::min<int>(window, static_cast<int>(ctx.size()));
    for (int j = 0; j < take; ++j) {
        w[window - take + j] = ctx[ctx.size() - take + j];
    }
    return w;
}

Distribution nlm_forward(const NLMParams& p, const Context& ctx) {
    Distribution d;
    d.probs = masked_softmax(nlm_logits(p, nlm_window(ctx, p.window)), kFirstRegularId);
    return d;
}

double nlm_loss_and_grad(const NLMParams& p,
                         const std::vector<std::pair<Context, WordId>>& batch,
                         double weight_decay, NLMParams& grad) {
    if (batch.empty()) throw UsageError("empty nlm batch");
    const double inv = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    const int m = p.window * p.dim;
    std::vector<double> x(m), a(p.hidden), z(p.hidden), dz(p.hidden), da(p.hidden);
    std::vector<double> dlogits, dx(m);

    for (const auto& [window_ids, target] : batch) {
        check_word(target, p.vocab);
        if (static_cast<int>(window_ids.size()) != p.window) {
            throw UsageError("nlm expects exactly its window of context ids");
        }
        for (int j = 0; j < p.window; ++j) {
            check_word(window_ids[j], p.vocab);
            const double* row = p.C.row(window_ids[j]);
            std::copy(row, row + p.dim, x.begin() + static_cast<size_t>(j) * p.dim);
        }
        a = p.bh.a;
        gemv_add(p.H, x.data(), a.data());
        for (int i = 0; i < p.hidden; ++i) z[i] = std::tanh(a[i]);
        std::vector<double> y(p.b.a);
        gemv_add(p.W, x.data(), y.data());
        gemv_add(p.U, z.data(), y.data());

        loss += inv * softmax_nll_backward(y, target, dlogits);
        for (auto& g : dlogits) g *= inv;

        for (int i = 0; i < p.vocab; ++i) grad.b.a[i] += dlogits[i];
        outer_add(grad.U, dlogits.data(), z.data());
        outer_add(grad.W, dlogits.data(), x.data());

        std::fill(dz.begin(), dz.end(), 0.0);
        gemv_t_add(p.U, dlogits.data(), dz.data());
        for (int i = 0; i < p.hidden; ++i) da[i] = dz[i] * (1.0 - z[i] * z[i]);
        for (int i = 0; i < p.hidden; ++i) grad.bh.a[i] += da[i];
        outer_add(grad.H, da.data(), x.data());

        std::fill(dx.begin(), dx.end(), 0.0);
        gemv_t_add(p.W, dlogits.data(), dx.data());
        gemv_t_add(p.H, da.data(), dx.data());
        for (int j = 0; j < p.window; ++j) {
            double* crow = grad.C.row(window_ids[j]);
            const double* part = dx.data() + static_cast<size_t>(j) * p.dim;
            for (int k = 0; k < p.dim; ++k) crow[k] += part[k];
        }
    }

    if (weight_decay > 0.0) {
        // Penalty on weights and embeddings only, applied once per batch.
        const Matrix* regs[] = {&p.W, &p.U, &p.H, &p.C};
        Matrix* gregs[] = {&grad.W, &grad.U, &grad.H, &grad.C};
        for (int r = 0; r < 4; ++r) {
            double sq = 0.0;
            for (size_t i = 0; i < regs[r]->size(); ++i) {
                double v = regs[r]->a[i];
                sq += v * v;
                gregs[r]->a[i] += weight_decay * v;
            }
            loss += 0.5 * weight_decay * sq;
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// CBOW

WordId NoiseDistribution::sample(Rng& rng) const {
    double u = rng.uniform() * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    size_t idx = std::min<size_t>(it - cum.begin(), cum.size() - 1);
    return static_cast<WordId>(idx + kFirstRegularId);
}

NoiseDistribution NoiseDistribution::unigram_pow(const Vocabulary& vocab, double power) {
    NoiseDistribution n;
    double running = 0.0;
    for (size_t w = kFirstRegularId; w < vocab.size(); ++w) {
        running += std::pow(static_cast<double>(vocab.freq(static_cast<WordId>(w))), power);
        n.cum.push_back(running);
    }
    if (n.cum.empty() || n.cum.back() <= 0.0) {
        throw DataError("noise distribution needs at least one recommendable word");
    }
    return n;
}

// Weight on the j-th most recent of n present words (j = 1 nearest). The
// printed formula puts the largest weight on the farthest word; the reverse
// flag flips that.
static double position_weight(int j, int n, bool reverse) {
    int k = reverse ? (n + 1 - j) : j;
    return 2.0 * k / (static_cast<double>(n) * (n + 1));
}

std::vector<double> cbow_context_vector(const CBOWParams& p,
                                        const std::vector<WordId>& ctx) {
    int n = std::min<int>(p.window, static_cast<int>(ctx.size()));
    if (n < 1) throw UsageError("cbow needs at least one context word");
    std::vector<double> u(p.dim, 0.0);
    for (int j = 1; j <= n; ++j) {
        WordId w = ctx[ctx.size() - j];
        check_word(w, p.vocab);
        double weight = p.weighted ? position_weight(j, n, p.reverse_weights)
                                   : 1.0 / static_cast<double>(n);
        const double* row = p.Vin.row(w);
        for (int k = 0; k < p.dim; ++k) u[k] += weight * row[k];
    }
    return u;
}

Distribution cbow_forward(const CBOWParams& p, const Context& ctx) {
    auto u = cbow_context_vector(p, ctx);
    std::vector<double> logits(p.vocab, 0.0);
    gemv_add(p.Vout, u.data(), logits.data());
    Distribution d;
    d.probs = masked_softmax(logits, kFirstRegularId);
    return d;
}

double cbow_example_loss_and_grad(const CBOWParams& p, const std::vector<WordId>& ctx,
                                  WordId target, const std::vector<WordId>& negatives,
                                  CBOWParams& grad) {
    check_word(target, p.vocab);
    auto u = cbow_context_vector(p, ctx);
    std::vector<double> du(p.dim, 0.0);
    double loss = 0.0;

    auto pair_term = [&](WordId w, double label) {
        // label 1 for the target, 0 for a negative
        double s = dot(p.Vout.row(w), u.data(), p.dim);
        double sig = sigmoid(s);
        loss += label > 0.5 ? -std::log(sig) : -std::log(1.0 - sig);
        double ds = sig - label;
        const double* vout = p.Vout.row(w);
        double* gout = grad.Vout.row(w);
        for (int k = 0; k < p.dim; ++k) {
            gout[k] += ds * u[k];
            du[k] += ds * vout[k];
        }
    };
    pair_term(target, 1.0);
    for (WordId nw : negatives) {
        check_word(nw, p.vocab);
        pair_term(nw, 0.0);
    }

    int n = std::min<int>(p.window, static_cast<int>(ctx.size()));
    for (int j = 1; j <= n; ++j) {
        WordId w = ctx[ctx.size() - j];
        double weight = p.weighted ? position_weight(j, n, p.reverse_weights)
                                   : 1.0 / static_cast<double>(n);
        double* gin = grad.Vin.row(w);
        for (int k = 0; k < p.dim; ++k) gin[k] += weight * du[k];
    }
    return loss;
}

double cbow_loss_and_grad(const CBOWParams& p,
                          const std::vector<std::pair<std::vector<WordId>, WordId>>& batch,
                          const NoiseDistribution& noise, Rng& rng, CBOWParams& grad) {
    if (batch.empty()) throw UsageError("empty cbow batch");
    double total = 0.0;
    std::vector<WordId> negatives;
    CBOWParams local = zeros_like(p);
    for (const auto& [ctx, target] : batch) {
        negatives.clear();
        for (int s = 0; s < p.negatives; ++s) {
            WordId w = noise.sample(rng);
            if (w == target) continue;  // a draw colliding with the target is dropped
            negatives.push_back(w);
        }
        total += cbow_example_loss_and_grad(p, ctx, target, negatives, local);
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    auto lt = local.tensors();
    auto gt = grad.tensors();
    for (size_t i = 0; i < lt.size(); ++i) {
        for (size_t k = 0; k < lt[i].m->size(); ++k) gt[i].m->a[k] += inv * lt[i].m->a[k];
    }
    return total * inv;
}

// ---------------------------------------------------------------------------
// RNN

std::pair<std::vector<double>, std::vector<double>> rnn_step(
    const RNNParams& p, WordId w, const std::vector<double>& h_prev) {
    check_word(w, p.vocab);
    if (static_cast<int>(h_prev.size()) != p.dim) throw UsageError("rnn state size");
    std::vector<double> x(p.dim);
    const double* crow = p.C.row(w);
    for (int k = 0; k < p.dim; ++k) x[k] = crow[k] + h_prev[k];
    std::vector<double> h(p.dim, 0.0);
    gemv_add(p.H, x.data(), h.data());
    for (auto& v : h) v = sigmoid(v);
    std::vector<double> y(p.vocab, 0.0);
    gemv_add(p.O, h.data(), y.data());
    return {std::move(h), std::move(y)};
}

double rnn_seq_loss_and_grad(const RNNParams& p, const std::vector<WordId>& seq,
                             int bptt, RNNParams& grad, int* n_targets) {
    if (bptt < 1) throw UsageError("bptt must be >= 1");
    const int steps = static_cast<int>(seq.size()) - 1;  // last word predicts nothing
    double loss = 0.0;
    int targets = 0;
    std::vector<double> h(p.dim, 0.0);

    struct Cache {
        WordId w;
        WordId target;  // kUnkId and kPadId mean "no loss here"
        std::vector<double> x, h;
    };

    // First pass to count loss terms so gradients can be scaled as they are
    // produced (the objective is the per-target mean).
    for (int t = 0; t < steps; ++t) {
        if (seq[t + 1] >= kFirstRegularId) ++targets;
    }
    if (n_targets) *n_targets = targets;
    if (steps < 1 || targets == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(targets);

    std::vector<Cache> seg;
    std::vector<double> dlogits, dh(p.dim), da(p.dim), dx(p.dim);
    int t = 0;
    while (t < steps) {
        int seg_end = std::min(steps, t + bptt);
        seg.clear();
        std::vector<double> h_in = h;  // carried state, constant for this segment
        for (; t < seg_end; ++t) {
            Cache c;
            c.w = seq[t];
            c.target = seq[t + 1] >= kFirstRegularId ? seq[t + 1] : kPadId;
            check_word(c.w, p.vocab);
            c.x.resize(p.dim);
            const double* crow = p.C.row(c.w);
            for (int k = 0; k < p.dim; ++k) c.x[k] = crow[k] + h[k];
            c.h.assign(p.dim, 0.0);
            gemv_add(p.H, c.x.data(), c.h.data());
            for (auto& v : c.h) v = sigmoid(v);
            h = c.h;
            seg.push_back(std::move(c));
        }

        std::fill(dh.begin(), dh.end(), 0.0);
        for (int s = static_cast<int>(seg.size()) - 1; s >= 0; --s) {
            const Cache& c = seg[s];
            if (c.target != kPadId) {
                std::vector<double> y(p.vocab, 0.0);
                gemv_add(p.O, c.h.data(), y.data());
                loss += inv * softmax_nll_backward(y, c.target, dlogits);
                for (auto& g : dlogits) g *= inv;
                outer_add(grad.O, dlogits.data(), c.h.data());
                gemv_t_add(p.O, dlogits.data(), dh.data());
            }
            for (int k = 0; k < p.dim; ++k) {
                da[k] = dh[k] * c.h[k] * (1.0 - c.h[k]);
            }
            outer_add(grad.H, da.data(), c.x.data());
            std::fill(dx.begin(), dx.end(), 0.0);
            gemv_t_add(p.H, da.data(), dx.data());
            double* crow = grad.C.row(c.w);
            for (int k = 0; k < p.dim; ++k) crow[k] += dx[k];
            dh = dx;  // x = C(w) + h_prev passes the error straight through
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// LSTM

static void lstm_preact(const Matrix& wx, const Matrix& wh, const Matrix& bias,
                        const std::vector<double>& x, const std::vector<double>& h_prev,
                        std::vector<double>& out) {
    out = bias.a;
    gemv_add(wx, x.data(), out.data());
    gemv_add(wh, h_prev.data(), out.data());
}

std::pair<LSTMState, std::vector<double>> lstm_step(const LSTMParams& p, WordId w,
                                                    const LSTMState& prev) {
    check_word(w, p.vocab);
    if (static_cast<int>(prev.h.size()) != p.hidden ||
        static_cast<int>(prev.c.size()) != p.hidden) {
        throw UsageError("lstm state size");
    }
    std::vector<double> x(p.C.row(w), p.C.row(w) + p.dim);
    std::vector<double> ai, af, ac, ao;
    lstm_preact(p.Wxi, p.Whi, p.bi, x, prev.h, ai);
    lstm_preact(p.Wxf, p.Whf, p.bf, x, prev.h, af);
    lstm_preact(p.Wxc, p.Whc, p.bc, x, prev.h, ac);
    lstm_preact(p.Wxo, p.Who, p.bo, x, prev.h, ao);
    LSTMState next;
    next.h.resize(p.hidden);
    next.c.resize(p.hidden);
    for (int k = 0; k < p.hidden; ++k) {
        double i = sigmoid(ai[k]);
        double f = sigmoid(af[k]);
        double g = std::tanh(ac[k]);
        double o = sigmoid(ao[k]);
        next.c[k] = f * prev.c[k] + i * g;
        next.h[k] = o * std::tanh(next.c[k]);
    }
    std::vector<double> y(p.vocab, 0.0);
    gemv_add(p.O, next.h.data(), y.data());
    return {std::move(next), std::move(y)};
}

double lstm_seq_loss_and_grad(const LSTMParams& p, const std::vector<WordId>& seq,
                              int bptt, LSTMParams& grad, int* n_targets) {
    if (bptt < 1) throw UsageError("bptt must be >= 1");
    const int steps = static_cast<int>(seq.size()) - 1;
    double loss = 0.0;
    int targets = 0;
    for (int t = 0; t < steps; ++t) {
        if (seq[t + 1] >= kFirstRegularId) ++targets;
    }
    if (n_targets) *n_targets = targets;
    if (steps < 1 || targets == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(targets);

    struct Cache {
        WordId w;
        WordId target;
        std::vector<double> x, i, f, g, o, c, th, h, c_prev, h_prev;
    };

    LSTMState state{std::vector<double>(p.hidden, 0.0), std::vector<double>(p.hidden, 0.0)};
    std::vector<Cache> seg;
    std::vector<double> dlogits;
    std::vector<double> dh(p.hidden), dc(p.hidden);
    std::vector<double> dai(p.hidden), daf(p.hidden), dac(p.hidden), dao(p.hidden);
    std::vector<double> ai, af, ac, ao;

    int t = 0;
    while (t < steps) {
        int seg_end = std::min(steps, t + bptt);
        seg.clear();
        for (; t < seg_end; ++t) {
            Cache cc;
            cc.w = seq[t];
            cc.target = seq[t + 1] >= kFirstRegularId ? seq[t + 1] : kPadId;
            check_word(cc.w, p.vocab);
            cc.h_prev = state.h;
            cc.c_prev = state.c;
            cc.x.assign(p.C.row(cc.w), p.C.row(cc.w) + p.dim);
            lstm_preact(p.Wxi, p.Whi, p.bi, cc.x, cc.h_prev, ai);
            lstm_preact(p.Wxf, p.Whf, p.bf, cc.x, cc.h_prev, af);
            lstm_preact(p.Wxc, p.Whc, p.bc, cc.x, cc.h_prev, ac);
            lstm_preact(p.Wxo, p.Who, p.bo, cc.x, cc.h_prev, ao);
            cc.i.resize(p.hidden);
            cc.f.resize(p.hidden);
            cc.g.resize(p.hidden);
            cc.o.resize(p.hidden);
            cc.c.resize(p.hidden);
            cc.th.resize(p.hidden);
            cc.h.resize(p.hidden);
            for (int k = 0; k < p.hidden; ++k) {
                cc.i[k] = sigmoid(ai[k]);
                cc.f[k] = sigmoid(af[k]);
                cc.g[k] = std::tanh(ac[k]);
                cc.o[k] = sigmoid(ao[k]);
                cc.c[k] = cc.f[k] * cc.c_prev[k] + cc.i[k] * cc.g[k];
                cc.th[k] = std::tanh(cc.c[k]);
                cc.h[k] = cc.o[k] * cc.th[k];
            }
            state.h = cc.h;
            state.c = cc.c;
            seg.push_back(std::move(cc));
        }

        std::fill(dh.begin(), dh.end(), 0.0);
        std::fill(dc.begin(), dc.end(), 0.0);
        for (int s = static_cast<int>(seg.size()) - 1; s >= 0; --s) {
            const Cache& cc = seg[s];
            if (cc.target != kPadId) {
                std::vector<double> y(p.vocab, 0.0);
                gemv_add(p.O, cc.h.data(), y.data());
                loss += inv * softmax_nll_backward(y, cc.target, dlogits);
                for (auto& g : dlogits) g *= inv;
                outer_add(grad.O, dlogits.data(), cc.h.data());
                gemv_t_add(p.O, dlogits.data(), dh.data());
            }
            for (int k = 0; k < p.hidden; ++k) {
                double do_ = dh[k] * cc.th[k];
                double dth = dh[k] * cc.o[k];
                double dck = dth * (1.0 - cc.th[k] * cc.th[k]) + dc[k];
                double dik = dck * cc.g[k];
                double dfk = dck * cc.c_prev[k];
                double dgk = dck * cc.i[k];
                dc[k] = dck * cc.f[k];  // flows to c_prev
                dai[k] = dik * cc.i[k] * (1.0 - cc.i[k]);
                daf[k] = dfk * cc.f[k] * (1.0 - cc.f[k]);
                dac[k] = dgk * (1.0 - cc.g[k] * cc.g[k]);
                dao[k] = do_ * cc.o[k] * (1.0 - cc.o[k]);
            }
            outer_add(grad.Wxi, dai.data(), cc.x.data());
            outer_add(grad.Whi, dai.data(), cc.h_prev.data());
            outer_add(grad.Wxf, daf.data(), cc.x.data());
            outer_add(grad.Whf, daf.data(), cc.h_prev.data());
            outer_add(grad.Wxc, dac.data(), cc.x.data());
            outer_add(grad.Whc, dac.data(), cc.h_prev.data());
            outer_add(grad.Wxo, dao.data(), cc.x.data());
            outer_add(grad.Who, dao.data(), cc.h_prev.data());
            for (int k = 0; k < p.hidden; ++k) {
                grad.bi.a[k] += dai[k];
                grad.bf.a[k] += daf[k];
                grad.bc.a[k] += dac[k];
                grad.bo.a[k] += dao[k];
            }
            std::vector<double> dx(p.dim, 0.0);
            gemv_t_add(p.Wxi, dai.data(), dx.data());
            gemv_t_add(p.Wxf, daf.data(), dx.data());
            gemv_t_add(p.Wxc, dac.data(), dx.data());
            gemv_t_add(p.Wxo, dao.data(), dx.data());
            double* crow = grad.C.row(cc.w);
            for (int k = 0; k < p.dim; ++k) crow[k] += dx[k];
            std::fill(dh.begin(), dh.end(), 0.0);
            gemv_t_add(p.Whi, dai.data(), dh.data());
            gemv_t_add(p.Whf, daf.data(), dh.data());
            gemv_t_add(p.Whc, dac.data(), dh.data());
            gemv_t_add(p.Who, dao.data(), dh.data());
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Training

static uint64_t epoch_seed(uint64_t seed, int epoch) {
    return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(epoch + 1));
}

template <typename P>
static void sgd_update(P& params, P& grad, double lr, double clip) {
    auto pt = params.tensors();
    auto gt = grad.tensors();
    if (clip > 0.0) {
        double sq = 0.0;
        for (auto& t : gt) {
            for (double v : t.m->a) sq += v * v;
        }
        double norm = std::sqrt(sq);
        if (norm > clip) {
            double scale = clip / norm;
            for (auto& t : gt) {
                for (double& v : t.m->a) v *= scale;
            }
        }
    }
    for (size_t i = 0; i < pt.size(); ++i) {
        for (size_t k = 0; k < pt[i].m->size(); ++k) {
            pt[i].m->a[k] -= lr * gt[i].m->a[k];
        }
    }
}

static void check_cfg(const TrainConfig& cfg) {
    if (cfg.lr <= 0.0) throw UsageError("learning rate must be positive");
    if (cfg.epochs < 1) throw UsageError("epochs must be >= 1");
    if (cfg.bptt < 1) throw UsageError("bptt truncation must be >= 1");
}

static void guard_finite(double loss, int epoch) {
    if (!std::isfinite(loss)) {
        throw DivergenceDetected("training loss became non-finite in epoch " +
                                 std::to_string(epoch + 1) +
                                 " (try a lower learning rate)");
    }
}

NLMParams train_nlm(const std::vector<std::vector<WordId>>& seqs, int vocab, int dim,
                    int window, int hidden, const TrainConfig& cfg,
                    std::vector<double>* epoch_losses) {
    check_cfg(cfg);
    NLMParams p = NLMParams::shaped(vocab, dim, window, hidden);
    Rng init_rng(cfg.seed);
    p.init(init_rng, cfg.init_scale);
    NLMParams grad = zeros_like(p);

    // Every position is an example; the first word's window is all pads.
    std::vector<std::pair<int32_t, int32_t>> examples;
    for (size_t s = 0; s < seqs.size(); ++s) {
        for (size_t i = 0; i < seqs[s].size(); ++i) {
            if (seqs[s][i] >= kFirstRegularId) {
                examples.emplace_back(static_cast<int32_t>(s), static_cast<int32_t>(i));
            }
        }
    }

    std::vector<std::pair<Context, WordId>> batch(1);
    for (int e = 0; e < cfg.epochs; ++e) {
        Rng rng(epoch_seed(cfg.seed, e));
        rng.shuffle(examples);
        double lr = cfg.lr * (cfg.epochs - e) / static_cast<double>(cfg.epochs);
        double total = 0.0;
        for (const auto& [s, i] : examples) {
            const auto& seq = seqs[s];
            Context ctx(seq.begin() + std::max<int>(0, i - window), seq.begin() + i);
            batch[0] = {nlm_window(ctx, window), seq[i]};
            auto gt = grad.tensors();
            for (auto& t : gt) t.m->fill(0.0);
            double loss = nlm_loss_and_grad(p, batch, cfg.weight_decay, grad);
            guard_finite(loss, e);
            sgd_update(p, grad, lr, cfg.grad_clip);
            total += loss;
        }
        if (epoch_losses) {
            epoch_losses->push_back(examples.empty() ? 0.0 : total / examples.size());
        }
    }
    return p;
}

CBOWParams train_cbow(const std::vector<std::vector<WordId>>& seqs,
                      const Vocabulary& vocab, int dim, int window, int negatives,
                      bool weighted, bool reverse_weights, const TrainConfig& cfg,
                      std::vector<double>* epoch_losses) {
    check_cfg(cfg);
    CBOWParams p = CBOWParams::shaped(static_cast<int>(vocab.size()), dim, window,
                                      negatives);
    p.weighted = weighted;
    p.reverse_weights = reverse_weights;
    Rng init_rng(cfg.seed);
    p.init(init_rng, cfg.init_scale);
    CBOWParams grad = zeros_like(p);
    auto noise = NoiseDistribution::unigram_pow(vocab, 0.75);

    // Position 0 has no context and is skipped.
    std::vector<std::pair<int32_t, int32_t>> examples;
    for (size_t s = 0; s < seqs.size(); ++s) {
        for (size_t i = 1; i < seqs[s].size(); ++i) {
            if (seqs[s][i] >= kFirstRegularId) {
                examples.emplace_back(static_cast<int32_t>(s), static_cast<int32_t>(i));
            }
        }
    }

    std::vector<std::pair<std::vector<WordId>, WordId>> batch(1);
    for (int e = 0; e < cfg.epochs; ++e) {
        Rng rng(epoch_seed(cfg.seed, e));
        rng.shuffle(examples);
        double lr = cfg.lr * (cfg.epochs - e) / static_cast<double>(cfg.epochs);
        double total = 0.0;
        for (const auto& [s, i] : examples) {
            const auto& seq = seqs[s];
            batch[0].first.assign(seq.begin() + std::max<int>(0, i - window),
                                  seq.begin() + i);
            batch[0].second = seq[i];
            auto gt = grad.tensors();
            for (auto& t : gt) t.m->fill(0.0);
            double loss = cbow_loss_and_grad(p, batch, noise, rng, grad);
            guard_finite(loss, e);
            sgd_update(p, grad, lr, cfg.grad_clip);
            total += loss;
        }
        if (epoch_losses) {
            epoch_losses->push_back(examples.empty() ? 0.0 : total / examples.size());
        }
    }
    return p;
}

template <typename P, typename StepFn>
static P train_recurrent(const std::vector<std::vector<WordId>>& seqs, P p,
                         const TrainConfig& cfg, std::vector<double>* epoch_losses,
                         const StepFn& seq_loss_and_grad) {
    check_cfg(cfg);
    Rng init_rng(cfg.seed);
    p.init(init_rng, cfg.init_scale);
    P grad = zeros_like(p);

    std::vector<int32_t> order;
    for (size_t s = 0; s < seqs.size(); ++s) {
        if (seqs[s].size() >= 2) order.push_back(static_cast<int32_t>(s));
    }

    for (int e = 0; e < cfg.epochs; ++e) {
        Rng rng(epoch_seed(cfg.seed, e));
        rng.shuffle(order);
        double lr = cfg.lr * (cfg.epochs - e) / static_cast<double>(cfg.epochs);
        double total = 0.0;
        int64_t total_targets = 0;
        for (int32_t s : order) {
            auto gt = grad.tensors();
            for (auto& t : gt) t.m->fill(0.0);
            int targets = 0;
            double loss = seq_loss_and_grad(p, seqs[s], cfg.bptt, grad, &targets);
            if (targets == 0) continue;
            guard_finite(loss, e);
            sgd_update(p, grad, lr, cfg.grad_clip);
            total += loss * targets;
            total_targets += targets;
        }
        if (epoch_losses) {
            epoch_losses->push_back(total_targets == 0 ? 0.0 : total / total_targets);
        }
    }
    return p;
}

RNNParams train_rnn(const std::vector<std::vector<WordId>>& seqs, int vocab, int dim,
                    const TrainConfig& cfg, std::vector<double>* epoch_losses) {
    return train_recurrent(
        seqs, RNNParams::shaped(vocab, dim), cfg, epoch_losses,
        [](const RNNParams& p, const std::vector<WordId>& seq, int bptt,
           RNNParams& grad, int* n) { return rnn_seq_loss_and_grad(p, seq, bptt, grad, n); });
}

LSTMParams train_lstm(const std::vector<std::vector<WordId>>& seqs, int vocab, int dim,
                      int hidden, const TrainConfig& cfg,
                      std::vector<double>* epoch_losses) {
    return train_recurrent(
        seqs, LSTMParams::shaped(vocab, dim, hidden), cfg, epoch_losses,
        [](const LSTMParams& p, const std::vector<WordId>& seq, int bptt,
           LSTMParams& grad, int* n) { return lstm_seq_loss_and_grad(p, seq, bptt, grad, n); });
}

// ---------------------------------------------------------------------------
// Recommenders

static bool neural_declines(const Context& ctx, const Vocabulary& vocab) {
    if (ctx.empty()) return true;
    if (vocab.freq(kUnkId) > 0) return false;
    for (WordId w : ctx) {
        if (w != kUnkId) return false;
    }
    return true;  // nothing but unknown words, and unk was never trained
}

NlmModel::NlmModel(Vocabulary vocab, NLMParams params, TrainConfig cfg)
    : vocab_(std::move(vocab)), params_(std::move(params)), cfg_(cfg) {
    if (static_cast<int>(vocab_.size()) != params_.vocab) {
        throw VocabularyMismatch("nlm parameters sized for a different vocabulary");
    }
}

std::optional<Distribution> NlmModel::next_distribution(const Context& ctx) const {
    check_context(ctx, vocab_.size());
    if (neural_declines(ctx, vocab_)) return std::nullopt;
    return nlm_forward(params_, ctx);
}

CbowModel::CbowModel(Vocabulary vocab, CBOWParams params, TrainConfig cfg)
    : vocab_(std::move(vocab)), params_(std::move(params)), cfg_(cfg) {
    if (static_cast<int>(vocab_.size()) != params_.vocab) {
        throw VocabularyMismatch("cbow parameters sized for a different vocabulary");
    }
}

std::optional<Distribution> CbowModel::next_distribution(const Context& ctx) const {
    check_context(ctx, vocab_.size());
    if (neural_declines(ctx, vocab_)) return std::nullopt;
    return cbow_forward(params_, ctx);
}

RnnModel::RnnModel(Vocabulary vocab, RNNParams params, TrainConfig cfg)
    : vocab_(std::move(vocab)), params_(std::move(params)), cfg_(cfg) {
    if (static_cast<int>(vocab_.size()) != params_.vocab) {
        throw VocabularyMismatch("rnn parameters sized for a different vocabulary");
    }
}

std::optional<Distribution> RnnModel::next_distribution(const Context& ctx) const {
    check_context(ctx, vocab_.size());
    if (neural_declines(ctx, vocab_)) return std::nullopt;
    std::vector<double> h(params_.dim, 0.0);
    std::vector<double> logits;
    for (WordId w : ctx) {
        auto [h2, y] = rnn_step(params_, w, h);
        h = std::move(h2);
        logits = std::move(y);
    }
    Distribution d;
    d.probs = masked_softmax(logits, kFirstRegularId);
    return d;
}

LstmModel::LstmModel(Vocabulary vocab, LSTMParams params, TrainConfig cfg)
    : vocab_(std::move(vocab)), params_(std::move(params)), cfg_(cfg) {
    if (static_cast<int>(vocab_.size()) != params_.vocab) {
        throw VocabularyMismatch("lstm parameters sized for a different vocabulary");
    }
}

std::optional<Distribution> LstmModel::next_distribution(const Context& ctx) const {
    check_context(ctx, vocab_.size());
    if (neural_declines(ctx, vocab_)) return std::nullopt;
    LSTMState state{std::vector<double>(params_.hidden, 0.0),
                    std::vector<double>(params_.hidden, 0.0)};
    std::vector<double> logits;
    for (WordId w : ctx) {
        auto [s2, y] = lstm_step(params_, w, state);
        state = std::move(s2);
        logits = std::move(y);
    }
    Distribution d;
    d.probs = masked_softmax(logits, kFirstRegularId);
    return d;
}

}  // namespace nextword
