#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "core/optimizer.hpp"
#include "core/tokenizer.hpp"
#include "core/transformer.hpp"

namespace fel::model {

struct ReaderConfig {
  TransformerConfig tf;
  int n_cand = 16;         // max candidates fused per example
  int max_seq_len = 512;   // max tokens per candidate input
  int max_target_len = 64;
};

// Concatenated per-candidate encoder outputs plus segment boundaries.
struct FusedRepresentation {
  ad::Var matrix;
  std::vector<Eigen::Index> segment_sizes;
};

// Trie over token-id sequences; a terminal node also offers <eos>.
class PrefixTrie {
 public:
  PrefixTrie() { nodes_.emplace_back(); }

  void insert(const std::vector<int>& seq);
  bool empty() const { return nodes_.size() == 1 && !nodes_[0].terminal; }

  static constexpr std::size_t kRoot = 0;
  // Child node for `token`, or nullopt.
  std::optional<std::size_t> child(std::size_t node, int token) const;
  const std::map<int, std::size_t>& children(std::size_t node) const {
    return nodes_[node].children;
  }
  bool terminal(std::size_t node) const { return nodes_[node].terminal; }

 private:
  struct TrieNode {
    std::map<int, std::size_t> children;
    bool terminal = false;
  };
  std::vector<TrieNode> nodes_;
};

PrefixTrie build_trie(const std::vector<std::string>& titles,
                      const text::Tokenizer& tokenizer);

struct TrainExample {
  std::vector<std::vector<int>> inputs;  // one token sequence per candidate
  std::vector<int> target;               // without <bos>/<eos>
};

class FusionReader {
 public:
  FusionReader(ReaderConfig cfg, std::uint64_t seed);

  const ReaderConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }

  // Each candidate is encoded independently; outputs are concatenated in
  // input order with positions restarting at 0 per segment.
  FusedRepresentation encode_candidates(
      ad::Tape& tape, const std::vector<std::vector<int>>& inputs);

  std::vector<int> greedy_decode(
      const std::vector<std::vector<int>>& inputs, std::size_t max_len,
      std::vector<Eigen::VectorXd>* step_logits = nullptr);

  // Greedy decoding restricted to trie-allowed continuations; the result is
  // always a complete root-to-terminal path.
  std::vector<int> constrained_decode(
      const std::vector<std::vector<int>>& inputs, const PrefixTrie& trie,
      std::size_t max_len);

  // Builds the loss graph on `tape`; call tape.backward on it for gradients.
  ad::Var teacher_forced_loss(ad::Tape& tape,
                              const std::vector<std::vector<int>>& inputs,
                              const std::vector<int>& target);
  double loss_value(const std::vector<std::vector<int>>& inputs,
                    const std::vector<int>& target);

  // Max relative error of reverse-mode gradients vs central finite
  // differences over >= min_coords sampled coordinates per parameter.
  double grad_check(const std::vector<std::vector<int>>& inputs,
                    const std::vector<int>& target, double epsilon,
                    std::mt19937_64& rng, std::size_t min_coords = 100);

  using EvalHook = std::function<void(std::size_t step)>;
  std::vector<LossPoint> train(const std::vector<TrainExample>& dataset,
                               const TrainConfig& tc,
                               const EvalHook& hook = nullptr);

  void save(const std::string& dir) const;
  void load(const std::string& dir);

 private:
  ReaderConfig cfg_;
  ParamStore store_;
  EncoderParams enc_;
  DecoderParams dec_;

  ad::Var decoder_logits(ad::Tape& tape, const std::vector<int>& dec_input,
                         const ad::Var& memory);
  void check_inputs(const std::vector<std::vector<int>>& inputs) const;
};

}  // namespace fel::model
