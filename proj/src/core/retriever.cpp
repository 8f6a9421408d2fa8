#include "core/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "core/tensor_io.hpp"

namespace fel::retriever {

using ad::Tape;
using ad::Var;

RetrieverModel::RetrieverModel(RetrieverConfig cfg,
                               const text::Tokenizer& tokenizer,
                               std::uint64_t seed)
    : cfg_(std::move(cfg)), tokenizer_(tokenizer) {
  cfg_.tf.validate();
  entity_enc_ = model::make_encoder(store_, cfg_.tf, "ent");
  passage_enc_ = model::make_encoder(store_, cfg_.tf, "psg");
  std::mt19937_64 rng(seed);
  model::init_params(store_, rng);
}

Var RetrieverModel::pooled(Tape& tape, const model::EncoderParams& enc,
                           const std::vector<int>& tokens) {
  if (!tokenizer_.contains("<unk>")) {
    throw Error(ErrorCode::UnknownTokenOverflow, "vocabulary lacks <unk>");
  }
  Var hidden = model::encoder_forward(tape, enc, cfg_.tf, tokens);
  return tape.mean_rows(hidden);
}

Var RetrieverModel::encode_entity_var(Tape& tape, const kb::Entity& e) {
  auto tokens = tokenizer_.encode_tokens(text::build_retrieval_entity_text(e));
  return pooled(tape, entity_enc_, tokens);
}

Var RetrieverModel::encode_passage_var(Tape& tape, const text::Passage& p) {
  auto tokens =
      tokenizer_.encode_tokens(text::build_retrieval_passage_text(p));
  return pooled(tape, passage_enc_, tokens);
}

Eigen::VectorXd RetrieverModel::encode_entity(const kb::Entity& e) {
  Tape tape;
  return encode_entity_var(tape, e)->value.row(0).transpose();
}

Eigen::VectorXd RetrieverModel::encode_passage(const text::Passage& p) {
  Tape tape;
  return encode_passage_var(tape, p)->value.row(0).transpose();
}

double score(const Eigen::VectorXd& e_emb, const Eigen::VectorXd& p_emb) {
  if (e_emb.size() != p_emb.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(e_emb.size()) + " vs " +
                    std::to_string(p_emb.size()));
  }
  return e_emb.dot(p_emb);
}

double nce_term(double positive, const std::vector<double>& negatives) {
  double hi = positive;
  for (double s : negatives) hi = std::max(hi, s);
  double denom = std::exp(positive - hi);
  for (double s : negatives) denom += std::exp(s - hi);
  return std::log(denom) - (positive - hi);
}

std::vector<ScoredEntity> rank_and_truncate(std::vector<ScoredEntity> scored,
                                            std::size_t k) {
  std::sort(scored.begin(), scored.end(),
            [](const ScoredEntity& a, const ScoredEntity& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<ScoredEntity> RetrieverModel::top_k(const kb::EntityStore& store,
                                                const text::Passage& p,
                                                std::size_t k) {
  if (store.empty()) throw Error(ErrorCode::EmptyStore, "top_k");
  Eigen::VectorXd q = encode_passage(p);
  std::vector<ScoredEntity> scored;
  scored.reserve(store.size());
  for (const auto& e : store.entities()) {
    scored.push_back({e.id, score(encode_entity(e), q)});
  }
  return rank_and_truncate(std::move(scored), k);
}

Var RetrieverModel::nce_loss_var(Tape& tape, const text::Passage& p,
                                 const std::vector<kb::Entity>& positives,
                                 const std::vector<kb::Entity>& negatives) {
  if (positives.empty()) throw Error(ErrorCode::EmptyPositives, "nce_loss");
  Var p_emb = encode_passage_var(tape, p);
  std::vector<Var> neg_scores;
  for (const auto& e : negatives) {
    neg_scores.push_back(tape.matmul_nt(encode_entity_var(tape, e), p_emb));
  }
  Var total;
  for (const auto& e : positives) {
    Var pos = tape.matmul_nt(encode_entity_var(tape, e), p_emb);
    std::vector<Var> row = {pos};
    row.insert(row.end(), neg_scores.begin(), neg_scores.end());
    Var loss_i = tape.sub(tape.logsumexp_row(tape.concat_cols(row)), pos);
    total = total ? tape.add(total, loss_i) : loss_i;
  }
  return tape.scale(total, 1.0 / static_cast<double>(positives.size()));
}

double RetrieverModel::nce_loss(const text::Passage& p,
                                const std::vector<kb::Entity>& positives,
                                const std::vector<kb::Entity>& negatives) {
  Tape tape;
  return nce_loss_var(tape, p, positives, negatives)->value(0, 0);
}

std::vector<std::string> RetrieverModel::mine_negatives(
    const kb::EntityStore& store, const text::Passage& p,
    const std::vector<std::string>& gold, std::size_t n, double hard_fraction,
    std::mt19937_64& rng) {
  std::unordered_set<std::string> gold_set(gold.begin(), gold.end());
  if (n + gold_set.size() > store.size()) {
    throw Error(ErrorCode::InsufficientEntities,
                "need " + std::to_string(n) + " negatives from " +
                    std::to_string(store.size() - gold_set.size()) +
                    " non-gold entities");
  }
  std::size_t n_hard = static_cast<std::size_t>(
      std::ceil(hard_fraction * static_cast<double>(n)));
  std::vector<std::string> out;
  std::unordered_set<std::string> taken;
  if (n_hard > 0) {
    for (const auto& se : top_k(store, p, store.size())) {
      if (gold_set.count(se.id)) continue;
      out.push_back(se.id);
      taken.insert(se.id);
      if (out.size() == n_hard) break;
    }
  }
  std::vector<std::string> pool;
  for (const auto& e : store.entities()) {
    if (!gold_set.count(e.id) && !taken.count(e.id)) pool.push_back(e.id);
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; out.size() < n; ++i) out.push_back(pool[i]);
  return out;
}

void RetrieverModel::save(const std::string& dir) const {
  io::save_params(dir, store_);
}

void RetrieverModel::load(const std::string& dir) {
  io::load_params(dir, store_);
}

VectorIndex::VectorIndex(const ad::Mat& embeddings,
                         std::vector<std::string> ids)
    : embeddings_(embeddings), ids_(std::move(ids)) {
  if (embeddings_.rows() != static_cast<Eigen::Index>(ids_.size())) {
    throw Error(ErrorCode::DimensionMismatch, "index rows vs ids");
  }
}

VectorIndex VectorIndex::build(RetrieverModel& model,
                               const kb::EntityStore& store) {
  if (store.empty()) throw Error(ErrorCode::EmptyStore, "build index");
  ad::Mat m(static_cast<Eigen::Index>(store.size()), model.config().tf.d_model);
  std::vector<std::string> ids;
  Eigen::Index row = 0;
  for (const auto& e : store.entities()) {
    m.row(row++) = model.encode_entity(e).transpose();
    ids.push_back(e.id);
  }
  return VectorIndex(m, std::move(ids));
}

std::vector<ScoredEntity> VectorIndex::top_k(const Eigen::VectorXd& query,
                                             std::size_t k) const {
  if (ids_.empty()) throw Error(ErrorCode::EmptyStore, "empty index");
  if (query.size() != embeddings_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "query dim");
  }
  Eigen::VectorXd scores = embeddings_ * query;
  std::vector<ScoredEntity> scored;
  scored.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    scored.push_back({ids_[i], scores(static_cast<Eigen::Index>(i))});
  }
  return rank_and_truncate(std::move(scored), k);
}

double recall_at_k(RetrieverModel& model,
                   const std::vector<RetrievalExample>& dataset,
                   const kb::EntityStore& store, std::size_t k) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "recall_at_k");
  VectorIndex index = VectorIndex::build(model, store);
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& ex : dataset) {
    auto ranked = index.top_k(model.encode_passage(ex.passage), k);
    std::unordered_set<std::string> retrieved;
    for (const auto& se : ranked) retrieved.insert(se.id);
    for (const auto& gold : ex.gold_ids) {
      ++total;
      if (retrieved.count(gold)) ++hits;
    }
  }
  if (total == 0) throw Error(ErrorCode::EmptyDataset, "no gold annotations");
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<model::LossPoint> train_retriever(
    RetrieverModel& model, const std::vector<RetrievalExample>& dataset,
    const kb::EntityStore& store, const model::TrainConfig& tc) {
  std::vector<const RetrievalExample*> with_gold;
  for (const auto& ex : dataset) {
    if (!ex.gold_ids.empty()) with_gold.push_back(&ex);
  }
  if (with_gold.empty()) throw Error(ErrorCode::EmptyDataset, "no positives");

  std::mt19937_64 rng(tc.seed);
  model::Adam opt;
  std::vector<model::LossPoint> curve;
  const std::size_t refresh = 50;  // hard-negative index refresh interval
  VectorIndex index;
  std::vector<std::size_t> order(with_gold.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();

  const std::size_t n_neg =
      std::min(model.config().negatives, store.size() - 1);
  for (std::size_t step = 1; step <= tc.steps; ++step) {
    if ((step - 1) % refresh == 0) index = VectorIndex::build(model, store);
    if (cursor >= order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    const RetrievalExample& ex = *with_gold[order[cursor++]];
    std::unordered_set<std::string> gold_set(ex.gold_ids.begin(),
                                             ex.gold_ids.end());
    std::size_t want = std::min(n_neg, store.size() - gold_set.size());
    std::size_t n_hard = static_cast<std::size_t>(std::ceil(
        model.config().hard_fraction * static_cast<double>(want)));

    std::vector<std::string> neg_ids;
    std::unordered_set<std::string> taken;
    for (const auto& se :
         index.top_k(model.encode_passage(ex.passage), store.size())) {
      if (neg_ids.size() >= n_hard) break;
      if (gold_set.count(se.id)) continue;
      neg_ids.push_back(se.id);
      taken.insert(se.id);
    }
    std::vector<std::string> pool;
    for (const auto& e : store.entities()) {
      if (!gold_set.count(e.id) && !taken.count(e.id)) pool.push_back(e.id);
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t i = 0; neg_ids.size() < want && i < pool.size(); ++i) {
      neg_ids.push_back(pool[i]);
    }

    std::vector<kb::Entity> positives;
    for (const auto& id : ex.gold_ids) {
      if (const kb::Entity* e = store.by_id(id)) positives.push_back(*e);
    }
    std::vector<kb::Entity> negatives;
    for (const auto& id : neg_ids) negatives.push_back(*store.by_id(id));

    model.params().zero_grads();
    Tape tape;
    Var loss = model.nce_loss_var(tape, ex.passage, positives, negatives);
    tape.backward(loss);
    double value = loss->value(0, 0);
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::DivergenceDetected,
                  "loss at step " + std::to_string(step));
    }
    double lr = model::lr_at_step(step, tc.steps, tc.lr, tc.warmup);
    opt.step(model.params(), lr);
    curve.push_back({step, value, lr});
  }
  return curve;
}

}  // namespace fel::retriever
