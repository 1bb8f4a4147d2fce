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

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nextword/numeric.hpp"
#include "nextword/types.hpp"
#include "nextword/vocab.hpp"

namespace nextword {

struct TrainConfig {
    double lr = 0.05;          // linearly decayed: epoch e runs at lr*(E-e)/E
    int epochs = 5;
    uint64_t seed = 1;
    double init_scale = 0.05;  // weights ~ U(-scale, scale); biases 0
    double weight_decay = 0.0; // L2 on weights and embeddings, not biases
    double grad_clip = 0.0;    // global-norm clip per update; 0 disables
    int bptt = 16;             // truncation segment; >= length means full
};

// ---------------------------------------------------------------------------
// Parameter blocks. Every struct exposes its tensors as a named list, which
// the optimizer, the serializer, and the finite-difference checks all share.

struct NLMParams {
    int vocab = 0, dim = 0, window = 0, hidden = 0;  // window = context words
    Matrix C;   // vocab x dim
    Matrix H;   // hidden x window*dim
    Matrix bh;  // hidden x 1
    Matrix U;   // vocab x hidden
    Matrix W;   // vocab x window*dim
    Matrix b;   // vocab x 1

    static NLMParams shaped(int vocab, int dim, int window, int hidden);
    std::vector<NamedTensor> tensors();
    void init(Rng& rng, double scale);
};

struct CBOWParams {
    int vocab = 0, dim = 0, window = 0, negatives = 0;
    bool weighted = false;         // position-weighted context average
    bool reverse_weights = false;  // heaviest weight on the nearest word
    Matrix Vin;   // vocab x dim, context-side vectors
    Matrix Vout;  // vocab x dim, word-side vectors

    static CBOWParams shaped(int vocab, int dim, int window, int negatives);
    std::vector<NamedTensor> tensors();
    void init(Rng& rng, double scale);
};

struct RNNParams {
    int vocab = 0, dim = 0;  // hidden size equals dim: input is C(w) + h
    Matrix C;  // vocab x dim
    Matrix H;  // dim x dim
    Matrix O;  // vocab x dim

    static RNNParams shaped(int vocab, int dim);
    std::vector<NamedTensor> tensors();
    void init(Rng& rng, double scale);
};

struct LSTMParams {
    int vocab = 0, dim = 0, hidden = 0;
    Matrix C;                       // vocab x dim
    Matrix Wxi, Wxf, Wxc, Wxo;      // hidden x dim
    Matrix Whi, Whf, Whc, Who;      // hidden x hidden
    Matrix bi, bf, bc, bo;          // hidden x 1; forget bias starts at 1
    Matrix O;                       // vocab x hidden

    static LSTMParams shaped(int vocab, int dim, int hidden);
    std::vector<NamedTensor> tensors();
    void init(Rng& rng, double scale);
};

// Zeroes every tensor in place; use on a shaped copy to hold gradients.
template <typename P>
P zeros_like(const P& p) {
    P g = p;
    for (auto& t : g.tensors()) t.m->fill(0.0);
    return g;
}

// ---------------------------------------------------------------------------
// Forward passes and analytic gradients. Loss gradients accumulate into the
// given gradient block (zero it first); returned losses are per-batch means
// except the *_seq_* variants, which are per-target means for one sequence.

std::vector<double> nlm_logits(const NLMParams& p, const Context& window_ids);
Distribution nlm_forward(const NLMParams& p, const Context& ctx);
double nlm_loss_and_grad(const NLMParams& p,
                         const std::vector<std::pair<Context, WordId>>& batch,
                         double weight_decay, NLMParams& grad);

// Negative-sampling noise: unigram frequency^power over recommendable words.
struct NoiseDistribution {
    std::vector<double> cum;  // cumulative over ids [kFirstRegularId, vocab)
    WordId sample(Rng& rng) const;
    static NoiseDistribution unigram_pow(const Vocabulary& vocab, double power = 0.75);
};

std::vector<double> cbow_context_vector(const CBOWParams& p,
                                        const std::vector<WordId>& ctx);
Distribution cbow_forward(const CBOWParams& p, const Context& ctx);
double cbow_example_loss_and_grad(const CBOWParams& p, const std::vector<WordId>& ctx,
                                  WordId target, const std::vector<WordId>& negatives,
                                  CBOWParams& grad);
double cbow_loss_and_grad(const CBOWParams& p,
                          const std::vector<std::pair<std::vector<WordId>, WordId>>& batch,
                          const NoiseDistribution& noise, Rng& rng, CBOWParams& grad);

std::pair<std::vector<double>, std::vector<double>> rnn_step(
    const RNNParams& p, WordId w, const std::vector<double>& h_prev);
double rnn_seq_loss_and_grad(const RNNParams& p, const std::vector<WordId>& seq,
                             int bptt, RNNParams& grad, int* n_targets = nullptr);

struct LSTMState {
    std::vector<double> h, c;
};
std::pair<LSTMState, std::vector<double>> lstm_step(const LSTMParams& p, WordId w,
                                                    const LSTMState& prev);
double lstm_seq_loss_and_grad(const LSTMParams& p, const std::vector<WordId>& seq,
                              int bptt, LSTMParams& grad, int* n_targets = nullptr);

// ---------------------------------------------------------------------------
// Seeded single-threaded SGD. Example order reshuffles every epoch as a pure
// function of (seed, epoch); epoch_losses (optional) receives the mean
// training loss per epoch. Throws DivergenceDetected on non-finite loss.

NLMParams train_nlm(const std::vector<std::vector<WordId>>& seqs, int vocab, int dim,
                    int window, int hidden, const TrainConfig& cfg,
                    std::vector<double>* epoch_losses = nullptr);
CBOWParams train_cbow(const std::vector<std::vector<WordId>>& seqs,
                      const Vocabulary& vocab, int dim, int window, int negatives,
                      bool weighted, bool reverse_weights, const TrainConfig& cfg,
                      std::vector<double>* epoch_losses = nullptr);
RNNParams train_rnn(const std::vector<std::vector<WordId>>& seqs, int vocab, int dim,
                    const TrainConfig& cfg, std::vector<double>* epoch_losses = nullptr);
LSTMParams train_lstm(const std::vector<std::vector<WordId>>& seqs, int vocab, int dim,
                      int hidden, const TrainConfig& cfg,
                      std::vector<double>* epoch_losses = nullptr);

// ---------------------------------------------------------------------------
// Recommenders. A neural model declines only an empty context or a context
// of nothing but untrained unknown words; everything else gets a softmax
// distribution over the recommendable vocabulary.

class NlmModel : public LanguageModel {
public:
    NlmModel(Vocabulary vocab, NLMParams params, TrainConfig cfg);
    std::string_view kind() const override { return "nlm"; }
    const Vocabulary& vocabulary() const override { return vocab_; }
    std::optional<Distribution> next_distribution(const Context& ctx) const override;
    const NLMParams& params() const { return params_; }
    const TrainConfig& config() const { return cfg_; }
    void save(const std::string& path) const;

private:
    Vocabulary vocab_;
    NLMParams params_;
    TrainConfig cfg_;
};

class CbowModel : public LanguageModel {
public:
    CbowModel(Vocabulary vocab, CBOWParams params, TrainConfig cfg);
    std::string_view kind() const override {
        return params_.weighted ? "cbow-weighted" : "cbow";
    }
    const Vocabulary& vocabulary() const override { return vocab_; }
    std::optional<Distribution> next_distribution(const Context& ctx) const override;
    const CBOWParams& params() const { return params_; }
    const TrainConfig& config() const { return cfg_; }
    void save(const std::string& path) const;

private:
    Vocabulary vocab_;
    CBOWParams params_;
    TrainConfig cfg_;
};

class RnnModel : public LanguageModel {
public:
    RnnModel(Vocabulary vocab, RNNParams params, TrainConfig cfg);
    std::string_view kind() const override { return "rnn"; }
    const Vocabulary& vocabulary() const override { return vocab_; }
    std::optional<Distribution> next_distribution(const Context& ctx) const override;
    const RNNParams& params() const { return params_; }
    const TrainConfig& config() const { return cfg_; }
    void save(const std::string& path) const;

private:
    Vocabulary vocab_;
    RNNParams params_;
    TrainConfig cfg_;
};

class LstmModel : public LanguageModel {
public:
    LstmModel(Vocabulary vocab, LSTMParams params, TrainConfig cfg);
    std::string_view kind() const override { return "lstm"; }
    const Vocabulary& vocabulary() const override { return vocab_; }
    std::optional<Distribution> next_distribution(const Context& ctx) const override;
    const LSTMParams& params() const { return params_; }
    const TrainConfig& config() const { return cfg_; }
    void save(const std::string& path) const;

private:
    Vocabulary vocab_;
    LSTMParams params_;
    TrainConfig cfg_;
};

std::unique_ptr<LanguageModel> load_neural_model(const std::string& path,
                                                 const Vocabulary& vocab);

}  // namespace nextword
