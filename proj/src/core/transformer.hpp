#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "core/autograd.hpp"

namespace fel::model {

struct TransformerConfig {
  int d_model = 64;
  int heads = 2;
  int ffn = 128;
  int enc_layers = 2;
  int dec_layers = 2;
  int vocab_size = 0;

  void validate() const;
};

// Owns named parameters; iteration order is creation order (deterministic).
class ParamStore {
 public:
  ad::Parameter& add(const std::string& name, Eigen::Index rows,
                     Eigen::Index cols);
  ad::Parameter* find(const std::string& name);
  const std::vector<std::unique_ptr<ad::Parameter>>& all() const {
    return params_;
  }
  void zero_grads();
  std::size_t total_size() const;

 private:
  std::vector<std::unique_ptr<ad::Parameter>> params_;
};

struct LayerNormParams {
  ad::Parameter* gain;
  ad::Parameter* bias;
};

struct AttentionParams {
  ad::Parameter* wq;
  ad::Parameter* wk;
  ad::Parameter* wv;
  ad::Parameter* wo;
};

struct FfnParams {
  ad::Parameter* w1;
  ad::Parameter* b1;
  ad::Parameter* w2;
  ad::Parameter* b2;
};

struct EncoderLayerParams {
  LayerNormParams ln1;
  AttentionParams attn;
  LayerNormParams ln2;
  FfnParams ffn;
};

struct DecoderLayerParams {
  LayerNormParams ln1;
  AttentionParams self_attn;
  LayerNormParams ln2;
  AttentionParams cross_attn;
  LayerNormParams ln3;
  FfnParams ffn;
};

struct EncoderParams {
  ad::Parameter* embedding;
  std::vector<EncoderLayerParams> layers;
  LayerNormParams final_ln;
};

struct DecoderParams {
  ad::Parameter* embedding;
  std::vector<DecoderLayerParams> layers;
  LayerNormParams final_ln;
  ad::Parameter* output;  // d_model x vocab
};

// Registers parameters under `prefix` into `store`.
EncoderParams make_encoder(ParamStore& store, const TransformerConfig& cfg,
                           const std::string& prefix);
DecoderParams make_decoder(ParamStore& store, const TransformerConfig& cfg,
                           const std::string& prefix);

// Fan-in-scaled uniform init; layer norm gains 1, biases 0.
void init_params(ParamStore& store, std::mt19937_64& rng);

// Sinusoidal position table, positions 0..len-1.
ad::Mat positional_encoding(Eigen::Index len, int d_model);

// Pre-norm transformer encoder over one token sequence; positions start at 0.
// Returns the final hidden states (len x d_model).
ad::Var encoder_forward(ad::Tape& tape, const EncoderParams& params,
                        const TransformerConfig& cfg,
                        const std::vector<int>& tokens);

// Decoder with causal self-attention and full cross-attention over `memory`.
// Returns hidden states (len x d_model); apply `output` for logits.
ad::Var decoder_forward(ad::Tape& tape, const DecoderParams& params,
                        const TransformerConfig& cfg,
                        const std::vector<int>& tokens, const ad::Var& memory);

}  // namespace fel::model
