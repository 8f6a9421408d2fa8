#include "core/transformer.hpp"

#include <cmath>

namespace fel::model {

using ad::Mat;
using ad::Tape;
using ad::Var;

void TransformerConfig::validate() const {
  if (d_model <= 0 || heads <= 0 || ffn <= 0 || enc_layers <= 0 ||
      dec_layers <= 0 || vocab_size <= 0) {
    throw Error(ErrorCode::ConfigError, "non-positive transformer dimension");
  }
  if (d_model % heads != 0) {
    throw Error(ErrorCode::ConfigError, "d_model not divisible by heads");
  }
}

ad::Parameter& ParamStore::add(const std::string& name, Eigen::Index rows,
                               Eigen::Index cols) {
  params_.push_back(std::make_unique<ad::Parameter>(name, rows, cols));
  return *params_.back();
}

ad::Parameter* ParamStore::find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p->zero_grad();
}

std::size_t ParamStore::total_size() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

namespace {

LayerNormParams make_ln(ParamStore& s, const std::string& prefix, int d) {
  return {&s.add(prefix + ".gain", 1, d), &s.add(prefix + ".bias", 1, d)};
}

AttentionParams make_attn(ParamStore& s, const std::string& prefix, int d) {
  return {&s.add(prefix + ".wq", d, d), &s.add(prefix + ".wk", d, d),
          &s.add(prefix + ".wv", d, d), &s.add(prefix + ".wo", d, d)};
}

FfnParams make_ffn(ParamStore& s, const std::string& prefix, int d, int ffn) {
  return {&s.add(prefix + ".w1", d, ffn), &s.add(prefix + ".b1", 1, ffn),
          &s.add(prefix + ".w2", ffn, d), &s.add(prefix + ".b2", 1, d)};
}

}  // namespace

EncoderParams make_encoder(ParamStore& store, const TransformerConfig& cfg,
                           const std::string& prefix) {
  EncoderParams p;
  p.embedding = &store.add(prefix + ".embed", cfg.vocab_size, cfg.d_model);
  for (int i = 0; i < cfg.enc_layers; ++i) {
    std::string lp = prefix + ".l" + std::to_string(i);
    EncoderLayerParams layer;
    layer.ln1 = make_ln(store, lp + ".ln1", cfg.d_model);
    layer.attn = make_attn(store, lp + ".attn", cfg.d_model);
    layer.ln2 = make_ln(store, lp + ".ln2", cfg.d_model);
    layer.ffn = make_ffn(store, lp + ".ffn", cfg.d_model, cfg.ffn);
    p.layers.push_back(layer);
  }
  p.final_ln = make_ln(store, prefix + ".ln_f", cfg.d_model);
  return p;
}

DecoderParams make_decoder(ParamStore& store, const TransformerConfig& cfg,
                           const std::string& prefix) {
  DecoderParams p;
  p.embedding = &store.add(prefix + ".embed", cfg.vocab_size, cfg.d_model);
  for (int i = 0; i < cfg.dec_layers; ++i) {
    std::string lp = prefix + ".l" + std::to_string(i);
    DecoderLayerParams layer;
    layer.ln1 = make_ln(store, lp + ".ln1", cfg.d_model);
    layer.self_attn = make_attn(store, lp + ".self", cfg.d_model);
    layer.ln2 = make_ln(store, lp + ".ln2", cfg.d_model);
    layer.cross_attn = make_attn(store, lp + ".cross", cfg.d_model);
    layer.ln3 = make_ln(store, lp + ".ln3", cfg.d_model);
    layer.ffn = make_ffn(store, lp + ".ffn", cfg.d_model, cfg.ffn);
    p.layers.push_back(layer);
  }
  p.final_ln = make_ln(store, prefix + ".ln_f", cfg.d_model);
  p.output = &store.add(prefix + ".out", cfg.d_model, cfg.vocab_size);
  return p;
}

void init_params(ParamStore& store, std::mt19937_64& rng) {
  for (auto& p : store.all()) {
    bool is_gain = p->name.ends_with(".gain");
    bool is_bias = p->name.ends_with(".bias") || p->name.ends_with(".b1") ||
                   p->name.ends_with(".b2");
    if (is_gain) {
      p->value.setOnes();
      continue;
    }
    if (is_bias) {
      p->value.setZero();
      continue;
    }
    double bound = 1.0 / std::sqrt(static_cast<double>(p->value.rows()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
        p->value(i, j) = dist(rng);
      }
    }
  }
}

Mat positional_encoding(Eigen::Index len, int d_model) {
  Mat pe(len, d_model);
  for (Eigen::Index pos = 0; pos < len; ++pos) {
    for (int i = 0; i < d_model; i += 2) {
      double angle = static_cast<double>(pos) /
                     std::pow(10000.0, static_cast<double>(i) / d_model);
      pe(pos, i) = std::sin(angle);
      if (i + 1 < d_model) pe(pos, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

namespace {

Var layer_norm(Tape& t, const Var& x, const LayerNormParams& ln) {
  return t.layer_norm(x, t.param(*ln.gain), t.param(*ln.bias));
}

// Multi-head attention; `mask` (q_len x k_len, 0 / -1e9) may be empty.
Var attention(Tape& t, const AttentionParams& p, const TransformerConfig& cfg,
              const Var& queries, const Var& keys_values, const Mat& mask) {
  Var q = t.matmul(queries, t.param(*p.wq));
  Var k = t.matmul(keys_values, t.param(*p.wk));
  Var v = t.matmul(keys_values, t.param(*p.wv));
  auto qh = t.split_cols(q, cfg.heads);
  auto kh = t.split_cols(k, cfg.heads);
  auto vh = t.split_cols(v, cfg.heads);
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg.d_model / cfg.heads));
  std::vector<Var> heads;
  for (int h = 0; h < cfg.heads; ++h) {
    Var scores = t.scale(t.matmul_nt(qh[h], kh[h]), inv_sqrt);
    if (mask.size() > 0) scores = t.add(scores, t.constant(mask));
    Var weights = t.softmax_rows(scores);
    heads.push_back(t.matmul(weights, vh[h]));
  }
  return t.matmul(t.concat_cols(heads), t.param(*p.wo));
}

Var ffn_forward(Tape& t, const FfnParams& p, const Var& x) {
  Var h = t.relu(t.add_rowvec(t.matmul(x, t.param(*p.w1)), t.param(*p.b1)));
  return t.add_rowvec(t.matmul(h, t.param(*p.w2)), t.param(*p.b2));
}

Mat causal_mask(Eigen::Index len) {
  Mat m = Mat::Zero(len, len);
  for (Eigen::Index i = 0; i < len; ++i) {
    for (Eigen::Index j = i + 1; j < len; ++j) m(i, j) = -1e9;
  }
  return m;
}

}  // namespace

Var encoder_forward(Tape& tape, const EncoderParams& params,
                    const TransformerConfig& cfg,
                    const std::vector<int>& tokens) {
  Var x = tape.embedding(tape.param(*params.embedding), tokens);
  x = tape.add(x, tape.constant(positional_encoding(
                      static_cast<Eigen::Index>(tokens.size()), cfg.d_model)));
  for (const auto& layer : params.layers) {
    Var normed = layer_norm(tape, x, layer.ln1);
    x = tape.add(x, attention(tape, layer.attn, cfg, normed, normed, {}));
    normed = layer_norm(tape, x, layer.ln2);
    x = tape.add(x, ffn_forward(tape, layer.ffn, normed));
  }
  return layer_norm(tape, x, params.final_ln);
}

Var decoder_forward(Tape& tape, const DecoderParams& params,
                    const TransformerConfig& cfg,
                    const std::vector<int>& tokens, const ad::Var& memory) {
  Var x = tape.embedding(tape.param(*params.embedding), tokens);
  x = tape.add(x, tape.constant(positional_encoding(
                      static_cast<Eigen::Index>(tokens.size()), cfg.d_model)));
  Mat mask = causal_mask(static_cast<Eigen::Index>(tokens.size()));
  for (const auto& layer : params.layers) {
    Var normed = layer_norm(tape, x, layer.ln1);
    x = tape.add(x, attention(tape, layer.self_attn, cfg, normed, normed, mask));
    normed = layer_norm(tape, x, layer.ln2);
    x = tape.add(x, attention(tape, layer.cross_attn, cfg, normed, memory, {}));
    normed = layer_norm(tape, x, layer.ln3);
    x = tape.add(x, ffn_forward(tape, layer.ffn, normed));
  }
  return layer_norm(tape, x, params.final_ln);
}

}  // namespace fel::model
