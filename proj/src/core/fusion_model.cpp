#include "core/fusion_model.hpp"

#include <algorithm>
#include <cmath>

#include "core/tensor_io.hpp"

namespace fel::model {

using ad::Mat;
using ad::Tape;
using ad::Var;
using text::SpecialTokens;

void PrefixTrie::insert(const std::vector<int>& seq) {
  std::size_t node = kRoot;
  for (int token : seq) {
    auto it = nodes_[node].children.find(token);
    if (it == nodes_[node].children.end()) {
      nodes_.emplace_back();
      std::size_t next = nodes_.size() - 1;
      nodes_[node].children.emplace(token, next);
      node = next;
    } else {
      node = it->second;
    }
  }
  nodes_[node].terminal = true;
}

std::optional<std::size_t> PrefixTrie::child(std::size_t node,
                                             int token) const {
  auto it = nodes_[node].children.find(token);
  if (it == nodes_[node].children.end()) return std::nullopt;
  return it->second;
}

PrefixTrie build_trie(const std::vector<std::string>& titles,
                      const text::Tokenizer& tokenizer) {
  PrefixTrie trie;
  for (const auto& title : titles) {
    trie.insert(tokenizer.encode(title));
  }
  return trie;
}

FusionReader::FusionReader(ReaderConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)) {
  cfg_.tf.validate();
  enc_ = make_encoder(store_, cfg_.tf, "enc");
  dec_ = make_decoder(store_, cfg_.tf, "dec");
  std::mt19937_64 rng(seed);
  init_params(store_, rng);
}

void FusionReader::check_inputs(
    const std::vector<std::vector<int>>& inputs) const {
  if (inputs.empty()) {
    throw Error(ErrorCode::EmptyInput, "no candidate inputs");
  }
  if (inputs.size() > static_cast<std::size_t>(cfg_.n_cand)) {
    throw Error(ErrorCode::TooManyCandidates,
                std::to_string(inputs.size()) + " > n_cand=" +
                    std::to_string(cfg_.n_cand));
  }
  for (const auto& seq : inputs) {
    if (seq.empty() || seq.size() > static_cast<std::size_t>(cfg_.max_seq_len)) {
      throw Error(ErrorCode::SequenceTooLong,
                  "candidate input of length " + std::to_string(seq.size()));
    }
  }
}

FusedRepresentation FusionReader::encode_candidates(
    Tape& tape, const std::vector<std::vector<int>>& inputs) {
  check_inputs(inputs);
  FusedRepresentation fused;
  std::vector<Var> segments;
  for (const auto& seq : inputs) {
    Var h = encoder_forward(tape, enc_, cfg_.tf, seq);
    fused.segment_sizes.push_back(h->value.rows());
    segments.push_back(h);
  }
  fused.matrix = tape.concat_rows(segments);
  return fused;
}

Var FusionReader::decoder_logits(Tape& tape, const std::vector<int>& dec_input,
                                 const Var& memory) {
  Var hidden = decoder_forward(tape, dec_, cfg_.tf, dec_input, memory);
  return tape.matmul(hidden, tape.param(*dec_.output));
}

std::vector<int> FusionReader::greedy_decode(
    const std::vector<std::vector<int>>& inputs, std::size_t max_len,
    std::vector<Eigen::VectorXd>* step_logits) {
  Tape tape;
  FusedRepresentation fused = encode_candidates(tape, inputs);
  std::vector<int> out;
  std::vector<int> dec_input = {SpecialTokens::kBos};
  while (out.size() < max_len) {
    Var logits = decoder_logits(tape, dec_input, fused.matrix);
    Eigen::RowVectorXd last = logits->value.row(logits->value.rows() - 1);
    if (step_logits) step_logits->push_back(last.transpose());
    int best = 0;
    for (int i = 1; i < last.size(); ++i) {
      if (last(i) > last(best)) best = i;  // ties keep the lowest id
    }
    if (best == SpecialTokens::kEos) break;
    out.push_back(best);
    dec_input.push_back(best);
  }
  return out;
}

std::vector<int> FusionReader::constrained_decode(
    const std::vector<std::vector<int>>& inputs, const PrefixTrie& trie,
    std::size_t max_len) {
  if (trie.empty()) throw Error(ErrorCode::DeadEnd, "empty trie");
  Tape tape;
  FusedRepresentation fused = encode_candidates(tape, inputs);
  std::vector<int> out;
  std::vector<int> dec_input = {SpecialTokens::kBos};
  std::size_t node = PrefixTrie::kRoot;
  while (out.size() <= max_len) {
    std::vector<int> options;
    for (const auto& [token, child] : trie.children(node)) {
      options.push_back(token);
    }
    if (trie.terminal(node)) options.push_back(SpecialTokens::kEos);
    if (options.empty()) {
      throw Error(ErrorCode::DeadEnd, "trie node has no continuation");
    }
    Var logits = decoder_logits(tape, dec_input, fused.matrix);
    Eigen::RowVectorXd last = logits->value.row(logits->value.rows() - 1);
    std::sort(options.begin(), options.end());
    int best = options.front();
    for (int opt : options) {
      if (last(opt) > last(best)) best = opt;
    }
    if (best == SpecialTokens::kEos) break;
    out.push_back(best);
    dec_input.push_back(best);
    node = *trie.child(node, best);
  }
  return out;
}

Var FusionReader::teacher_forced_loss(
    Tape& tape, const std::vector<std::vector<int>>& inputs,
    const std::vector<int>& target) {
  if (target.size() + 1 > static_cast<std::size_t>(cfg_.max_target_len)) {
    throw Error(ErrorCode::TargetTooLong, std::to_string(target.size()));
  }
  FusedRepresentation fused = encode_candidates(tape, inputs);
  std::vector<int> dec_input = {SpecialTokens::kBos};
  dec_input.insert(dec_input.end(), target.begin(), target.end());
  std::vector<int> labels = target;
  labels.push_back(SpecialTokens::kEos);
  Var logits = decoder_logits(tape, dec_input, fused.matrix);
  return tape.cross_entropy_mean(logits, labels);
}

double FusionReader::loss_value(const std::vector<std::vector<int>>& inputs,
                                const std::vector<int>& target) {
  Tape tape;
  return teacher_forced_loss(tape, inputs, target)->value(0, 0);
}

double FusionReader::grad_check(const std::vector<std::vector<int>>& inputs,
                                const std::vector<int>& target, double epsilon,
                                std::mt19937_64& rng, std::size_t min_coords) {
  store_.zero_grads();
  {
    Tape tape;
    Var loss = teacher_forced_loss(tape, inputs, target);
    tape.backward(loss);
  }
  double max_rel = 0.0;
  for (auto& p : store_.all()) {
    std::size_t size = static_cast<std::size_t>(p->value.size());
    std::size_t n = std::min(size, min_coords);
    std::uniform_int_distribution<std::size_t> pick(0, size - 1);
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t idx = n == size ? s : pick(rng);
      double* data = p->value.data();
      double saved = data[idx];
      data[idx] = saved + epsilon;
      double plus = loss_value(inputs, target);
      data[idx] = saved - epsilon;
      double minus = loss_value(inputs, target);
      data[idx] = saved;
      double fd = (plus - minus) / (2.0 * epsilon);
      double analytic = p->grad.data()[idx];
      if (!std::isfinite(analytic)) {
        throw Error(ErrorCode::NonFiniteGradient, p->name);
      }
      double denom = std::max({std::abs(fd), std::abs(analytic), 1e-3});
      max_rel = std::max(max_rel, std::abs(fd - analytic) / denom);
    }
  }
  return max_rel;
}

std::vector<LossPoint> FusionReader::train(
    const std::vector<TrainExample>& dataset, const TrainConfig& tc,
    const EvalHook& hook) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "train");
  std::mt19937_64 rng(tc.seed);
  Adam opt;
  std::vector<LossPoint> curve;
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();  // forces an initial shuffle

  for (std::size_t step = 1; step <= tc.steps; ++step) {
    store_.zero_grads();
    double batch_loss = 0.0;
    for (std::size_t b = 0; b < tc.batch; ++b) {
      if (cursor >= order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const TrainExample& ex = dataset[order[cursor++]];
      Tape tape;
      Var loss = tape.scale(teacher_forced_loss(tape, ex.inputs, ex.target),
                            1.0 / static_cast<double>(tc.batch));
      tape.backward(loss);
      batch_loss += loss->value(0, 0);
    }
    if (!std::isfinite(batch_loss)) {
      throw Error(ErrorCode::DivergenceDetected,
                  "loss at step " + std::to_string(step));
    }
    double lr = lr_at_step(step, tc.steps, tc.lr, tc.warmup);
    opt.step(store_, lr);
    curve.push_back({step, batch_loss, lr});
    if (hook && tc.eval_every > 0 && step % tc.eval_every == 0) hook(step);
  }
  return curve;
}

void FusionReader::save(const std::string& dir) const {
  io::save_params(dir, store_);
}

void FusionReader::load(const std::string& dir) {
  io::load_params(dir, store_);
}

}  // namespace fel::model
