#pragma once

#include <random>
#include <string>
#include <vector>

#include "core/kb.hpp"
#include "core/optimizer.hpp"
#include "core/text_builders.hpp"
#include "core/tokenizer.hpp"
#include "core/transformer.hpp"

namespace fel::retriever {

struct RetrieverConfig {
  model::TransformerConfig tf;  // dec_layers unused; encoders only
  std::size_t negatives = 32;
  double hard_fraction = 0.1;
};

struct ScoredEntity {
  std::string id;
  double score;

  bool operator==(const ScoredEntity&) const = default;
};

class RetrieverModel {
 public:
  RetrieverModel(RetrieverConfig cfg, const text::Tokenizer& tokenizer,
                 std::uint64_t seed);

  const RetrieverConfig& config() const { return cfg_; }
  model::ParamStore& params() { return store_; }
  const text::Tokenizer& tokenizer() const { return tokenizer_; }

  Eigen::VectorXd encode_entity(const kb::Entity& e);
  Eigen::VectorXd encode_passage(const text::Passage& p);

  // Graph-building variants for training.
  ad::Var encode_entity_var(ad::Tape& tape, const kb::Entity& e);
  ad::Var encode_passage_var(ad::Tape& tape, const text::Passage& p);

  // Exact brute-force search over the whole store; descending score, ties by
  // ascending entity id. This is the reference path.
  std::vector<ScoredEntity> top_k(const kb::EntityStore& store,
                                  const text::Passage& p, std::size_t k = 100);

  // Mean over positives of -log(exp s+ / (exp s+ + sum_neg exp s-)).
  double nce_loss(const text::Passage& p,
                  const std::vector<kb::Entity>& positives,
                  const std::vector<kb::Entity>& negatives);
  ad::Var nce_loss_var(ad::Tape& tape, const text::Passage& p,
                       const std::vector<kb::Entity>& positives,
                       const std::vector<kb::Entity>& negatives);

  // ceil(hard_fraction*n) top-scoring non-gold entities plus a uniform sample
  // of the rest, disjoint from gold.
  std::vector<std::string> mine_negatives(const kb::EntityStore& store,
                                          const text::Passage& p,
                                          const std::vector<std::string>& gold,
                                          std::size_t n, double hard_fraction,
                                          std::mt19937_64& rng);

  void save(const std::string& dir) const;
  void load(const std::string& dir);

 private:
  RetrieverConfig cfg_;
  text::Tokenizer tokenizer_;
  model::ParamStore store_;
  model::EncoderParams entity_enc_;
  model::EncoderParams passage_enc_;

  ad::Var pooled(ad::Tape& tape, const model::EncoderParams& enc,
                 const std::vector<int>& tokens);
};

double score(const Eigen::VectorXd& e_emb, const Eigen::VectorXd& p_emb);

// Scalar reference form: -log(exp(s+) / (exp(s+) + sum_neg exp(s-))).
double nce_term(double positive, const std::vector<double>& negatives);

// Frozen matrix of entity embeddings for repeated queries.
class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(const ad::Mat& embeddings, std::vector<std::string> ids);

  static VectorIndex build(RetrieverModel& model, const kb::EntityStore& store);

  std::vector<ScoredEntity> top_k(const Eigen::VectorXd& query,
                                  std::size_t k) const;
  std::size_t size() const { return ids_.size(); }
  const ad::Mat& embeddings() const { return embeddings_; }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  ad::Mat embeddings_;  // one row per entity
  std::vector<std::string> ids_;
};

// Sorts (score desc, id asc) and truncates to k.
std::vector<ScoredEntity> rank_and_truncate(std::vector<ScoredEntity> scored,
                                            std::size_t k);

struct RetrievalExample {
  text::Passage passage;
  std::vector<std::string> gold_ids;
};

// Fraction of gold annotations whose entity appears in the passage's top-k.
double recall_at_k(RetrieverModel& model,
                   const std::vector<RetrievalExample>& dataset,
                   const kb::EntityStore& store, std::size_t k);

// NCE training with periodically refreshed hard negatives.
std::vector<model::LossPoint> train_retriever(
    RetrieverModel& model, const std::vector<RetrievalExample>& dataset,
    const kb::EntityStore& store, const model::TrainConfig& tc);

}  // namespace fel::retriever
