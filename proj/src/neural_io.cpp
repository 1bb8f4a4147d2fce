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

// Model files: a short ASCII header (one "key value" per line, ending with
// "end") followed by every tensor's cells as little-endian doubles in header
// order, row-major. The text part keeps files inspectable; the binary part
// keeps weights bit-exact across save/load.

#include <bit>
#include <cstring>
#include <map>
#include <sstream>

#include "nextword/io.hpp"
#include "nextword/neural.hpp"

namespace nextword {
namespace {

constexpr const char* kMagic = "nextword-neural v1";

void put_u64_le(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t get_u64_le(const std::string& s, size_t off) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    }
    return v;
}

void append_tensors(std::string& out, std::vector<NamedTensor> ts, std::string& header) {
    for (const auto& t : ts) {
        header += "tensor " + t.name + " " + std::to_string(t.m->rows) + " " +
                  std::to_string(t.m->cols) + "\n";
    }
    header += "end\n";
    out = header;
    for (const auto& t : ts) {
        for (double v : t.m->a) put_u64_le(out, std::bit_cast<uint64_t>(v));
    }
}

std::string config_lines(const TrainConfig& cfg) {
    std::string s;
    s += "lr " + fmt_double(cfg.lr) + "\n";
    s += "epochs " + std::to_string(cfg.epochs) + "\n";
    s += "seed " + std::to_string(cfg.seed) + "\n";
    s += "init_scale " + fmt_double(cfg.init_scale) + "\n";
    s += "weight_decay " + fmt_double(cfg.weight_decay) + "\n";
    s += "grad_clip " + fmt_double(cfg.grad_clip) + "\n";
    s += "bptt " + std::to_string(cfg.bptt) + "\n";
    return s;
}

// Header scanner: consumes "key value" lines up to the first "tensor" line.
struct Header {
    std::map<std::string, std::string> kv;
    std::vector<std::tuple<std::string, int, int>> tensors;
    size_t body_off = 0;  // byte offset of the binary section

    std::string need(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw DataError("model file missing field: " + key);
        return it->second;
    }
    int need_int(const std::string& key) const {
        return static_cast<int>(parse_int(need(key)));
    }
    double need_double(const std::string& key) const { return parse_double(need(key)); }
};

Header parse_header(const std::string& raw, const std::string& path) {
    Header h;
    size_t pos = 0;
    bool done = false;
    auto next_line = [&]() {
        size_t nl = raw.find('\n', pos);
        if (nl == std::string::npos) throw DataError("truncated model header: " + path);
        std::string line = raw.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    if (next_line() != kMagic) throw DataError("not a neural model file: " + path);
    while (!done) {
        std::string line = next_line();
        if (line == "end") {
            done = true;
        } else if (line.rfind("tensor ", 0) == 0) {
            auto parts = split_ws(line);
            if (parts.size() != 4) throw DataError("bad tensor line: " + path);
            h.tensors.emplace_back(parts[1], static_cast<int>(parse_int(parts[2])),
                                   static_cast<int>(parse_int(parts[3])));
        } else {
            size_t sp = line.find(' ');
            if (sp == std::string::npos || sp == 0) {
                throw DataError("bad header line in model file: " + path);
            }
            h.kv[line.substr(0, sp)] = line.substr(sp + 1);
        }
    }
    h.body_off = pos;
    return h;
}

TrainConfig config_from(const Header& h) {
    TrainConfig cfg;
    cfg.lr = h.need_double("lr");
    cfg.epochs = h.need_int("epochs");
    cfg.seed = static_cast<uint64_t>(parse_int(h.need("seed")));
    cfg.init_scale = h.need_double("init_scale");
    cfg.weight_decay = h.need_double("weight_decay");
    cfg.grad_clip = h.need_double("grad_clip");
    cfg.bptt = h.need_int("bptt");
    return cfg;
}

// Fills the shaped parameter block from the binary section, checking that the
// declared tensor list matches the expected shapes exactly.
template <typename P>
void read_tensors(P& p, const Header& h, const std::string& raw, const std::string& path) {
    auto ts = p.tensors();
    if (h.tensors.size() != ts.size()) {
        throw DataError("model file has wrong tensor count: " + path);
    }
    size_t off = h.body_off;
    for (size_t i = 0; i < ts.size(); ++i) {
        const auto& [name, rows, cols] = h.tensors[i];
        if (name != ts[i].name || rows != ts[i].m->rows || cols != ts[i].m->cols) {
            throw DataError("model file tensor mismatch at " + name + ": " + path);
        }
        size_t need = ts[i].m->size() * 8;
        if (off + need > raw.size()) throw DataError("truncated model body: " + path);
        for (auto& v : ts[i].m->a) {
            v = std::bit_cast<double>(get_u64_le(raw, off));
            off += 8;
        }
    }
    if (off != raw.size()) throw DataError("trailing bytes after model body: " + path);
}

void check_vocab(const Header& h, const Vocabulary& vocab, const std::string& path) {
    if (h.need_int("vocab") != static_cast<int>(vocab.size())) {
        throw VocabularyMismatch("model " + path + " was trained on a vocabulary of " +
                                 h.need("vocab") + " words, not " +
                                 std::to_string(vocab.size()));
    }
}

}  // namespace

void NlmModel::save(const std::string& path) const {
    std::string header = std::string(kMagic) + "\n";
    header += "kind nlm\n";
    header += "vocab " + std::to_string(params_.vocab) + "\n";
    header += "dim " + std::to_string(params_.dim) + "\n";
    header += "window " + std::to_string(params_.window) + "\n";
    header += "hidden " + std::to_string(params_.hidden) + "\n";
    header += config_lines(cfg_);
    std::string out;
    append_tensors(out, const_cast<NLMParams&>(params_).tensors(), header);
    atomic_write(path, out);
}

void CbowModel::save(const std::string& path) const {
    std::string header = std::string(kMagic) + "\n";
    header += "kind " + std::string(kind()) + "\n";
    header += "vocab " + std::to_string(params_.vocab) + "\n";
    header += "dim " + std::to_string(params_.dim) + "\n";
    header += "window " + std::to_string(params_.window) + "\n";
    header += "negatives " + std::to_string(params_.negatives) + "\n";
    header += "reverse_weights " + std::string(params_.reverse_weights ? "1" : "0") + "\n";
    header += config_lines(cfg_);
    std::string out;
    append_tensors(out, const_cast<CBOWParams&>(params_).tensors(), header);
    atomic_write(path, out);
}

void RnnModel::save(const std::string& path) const {
    std::string header = std::string(kMagic) + "\n";
    header += "kind rnn\n";
    header += "vocab " + std::to_string(params_.vocab) + "\n";
    header += "dim " + std::to_string(params_.dim) + "\n";
    header += config_lines(cfg_);
    std::string out;
    append_tensors(out, const_cast<RNNParams&>(params_).tensors(), header);
    atomic_write(path, out);
}

void LstmModel::save(const std::string& path) const {
    std::string header = std::string(kMagic) + "\n";
    header += "kind lstm\n";
    header += "vocab " + std::to_string(params_.vocab) + "\n";
    header += "dim " + std::to_string(params_.dim) + "\n";
    header += "hidden " + std::to_string(params_.hidden) + "\n";
    header += config_lines(cfg_);
    std::string out;
    append_tensors(out, const_cast<LSTMParams&>(params_).tensors(), header);
    atomic_write(path, out);
}

std::unique_ptr<LanguageModel> load_neural_model(const std::string& path,
                                                 const Vocabulary& vocab) {
    std::string raw = read_file(path);
    Header h = parse_header(raw, path);
    std::string kind = h.need("kind");
    TrainConfig cfg = config_from(h);
    check_vocab(h, vocab, path);

    if (kind == "nlm") {
        auto p = NLMParams::shaped(h.need_int("vocab"), h.need_int("dim"),
                                   h.need_int("window"), h.need_int("hidden"));
        read_tensors(p, h, raw, path);
        return std::make_unique<NlmModel>(vocab, std::move(p), cfg);
    }
    if (kind == "cbow" || kind == "cbow-weighted") {
        auto p = CBOWParams::shaped(h.need_int("vocab"), h.need_int("dim"),
                                    h.need_int("window"), h.need_int("negatives"));
        p.weighted = (kind == "cbow-weighted");
        p.reverse_weights = h.need_int("reverse_weights") != 0;
        read_tensors(p, h, raw, path);
        return std::make_unique<CbowModel>(vocab, std::move(p), cfg);
    }
    if (kind == "rnn") {
        auto p = RNNParams::shaped(h.need_int("vocab"), h.need_int("dim"));
        read_tensors(p, h, raw, path);
        return std::make_unique<RnnModel>(vocab, std::move(p), cfg);
    }
    if (kind == "lstm") {
        auto p = LSTMParams::shaped(h.need_int("vocab"), h.need_int("dim"),
                                    h.need_int("hidden"));
        read_tensors(p, h, raw, path);
        return std::make_unique<LstmModel>(vocab, std::move(p), cfg);
    }
    throw DataError("unknown model kind in " + path + ": " + kind);
}

}  // namespace nextword
