#include <random>

#include "core/retriever.hpp"
#include "doctest.h"

using namespace fel;

namespace {

retriever::RetrieverConfig small_config(int vocab) {
  retriever::RetrieverConfig rc;
  rc.tf.d_model = 16;
  rc.tf.heads = 2;
  rc.tf.ffn = 32;
  rc.tf.enc_layers = 1;
  rc.tf.dec_layers = 1;
  rc.tf.vocab_size = vocab;
  rc.negatives = 4;
  return rc;
}

struct Fixture {
  text::Tokenizer tok;
  kb::EntityStore store;
  retriever::RetrieverModel model;

  static Fixture make(std::size_t n_entities, std::uint64_t seed) {
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < n_entities; ++i) {
      texts.push_back("ent" + std::to_string(i) + " thing described here");
    }
    auto tok = text::Tokenizer::build_from_texts(texts, 1);
    kb::EntityStore store;
    for (std::size_t i = 0; i < n_entities; ++i) {
      store.add({"E" + std::to_string(i), "ent" + std::to_string(i) + " thing",
                 "described here"});
    }
    auto cfg = small_config(static_cast<int>(tok.vocab_size()));
    return Fixture{tok, std::move(store),
                   retriever::RetrieverModel(cfg, tok, seed)};
  }
};

text::Passage passage_of(const std::string& s) {
  text::Passage p;
  p.text = s;
  p.topic = s;
  return p;
}

}  // namespace

TEST_CASE("score is the dot product and checks dimensions") {
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 4, 5, 6;
  CHECK(retriever::score(a, b) == doctest::Approx(32.0));
  Eigen::VectorXd c(2);
  CHECK_THROWS_AS(retriever::score(a, c), Error);
}

TEST_CASE("rank_and_truncate breaks ties by ascending id") {
  std::vector<retriever::ScoredEntity> v = {
      {"b", 1.0}, {"a", 1.0}, {"c", 2.0}, {"d", 0.5}};
  auto out = retriever::rank_and_truncate(v, 3);
  REQUIRE(out.size() == 3);
  CHECK(out[0].id == "c");
  CHECK(out[1].id == "a");
  CHECK(out[2].id == "b");
}

TEST_CASE("nce_loss hand-computed values") {
  auto fx = Fixture::make(4, 0);
  // uniform scores: 1 positive vs 1 equal negative -> ln 2
  // identical entity text yields identical embeddings
  kb::Entity pos = *fx.store.by_id("E0");
  kb::Entity neg = pos;
  neg.id = "Ex";
  auto p = passage_of("ent0 thing described here");
  double uniform = fx.model.nce_loss(p, {pos}, {neg});
  CHECK(uniform == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(fx.model.nce_loss(p, {pos}, {}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(fx.model.nce_loss(p, {}, {neg}), Error);
}

TEST_CASE("nce_loss scalar oracle for fixed scores") {
  // -log(e^2 / (e^2 + e^0 + e^1)), computed by hand
  double s_pos = 2.0;
  std::vector<double> s_neg = {0.0, 1.0};
  double denom = std::exp(s_pos);
  for (double s : s_neg) denom += std::exp(s);
  double expect = -std::log(std::exp(s_pos) / denom);
  CHECK(expect == doctest::Approx(0.40760596444438079).epsilon(1e-12));
}

TEST_CASE("brute force and index agree with deterministic ordering") {
  auto fx = Fixture::make(30, 5);
  auto index = retriever::VectorIndex::build(fx.model, fx.store);
  CHECK(index.size() == 30);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = passage_of("ent" + std::to_string(trial * 7) +
                        " thing described here");
    auto brute = fx.model.top_k(fx.store, p, 10);
    auto indexed = index.top_k(fx.model.encode_passage(p), 10);
    REQUIRE(brute.size() == indexed.size());
    for (std::size_t i = 0; i < brute.size(); ++i) {
      CHECK(brute[i].id == indexed[i].id);
    }
  }
  // k = |store| is a permutation of all ids
  auto all = fx.model.top_k(fx.store, passage_of("ent0 thing"), 30);
  CHECK(all.size() == 30);

  kb::EntityStore empty;
  CHECK_THROWS_AS(fx.model.top_k(empty, passage_of("x"), 5), Error);
}

TEST_CASE("mine_negatives is disjoint from gold with the right mix") {
  auto fx = Fixture::make(40, 6);
  std::mt19937_64 rng(1);
  std::vector<std::string> gold = {"E0", "E1"};
  auto p = passage_of("ent0 thing described here");
  auto negs = fx.model.mine_negatives(fx.store, p, gold, 10, 0.3, rng);
  CHECK(negs.size() == 10);
  for (const auto& id : negs) {
    CHECK(std::find(gold.begin(), gold.end(), id) == gold.end());
  }
  std::sort(negs.begin(), negs.end());
  CHECK(std::unique(negs.begin(), negs.end()) == negs.end());

  CHECK_THROWS_AS(fx.model.mine_negatives(fx.store, p, gold, 39, 0.1, rng),
                  Error);
}

TEST_CASE("training on a toy store improves recall") {
  auto fx = Fixture::make(10, 8);
  std::vector<retriever::RetrievalExample> data;
  for (int i = 0; i < 10; ++i) {
    retriever::RetrievalExample ex;
    ex.passage = passage_of("ent" + std::to_string(i) + " thing described here");
    ex.gold_ids = {"E" + std::to_string(i)};
    data.push_back(ex);
  }
  double before = retriever::recall_at_k(fx.model, data, fx.store, 2);
  model::TrainConfig tc;
  tc.steps = 300;
  tc.lr = 3e-3;
  tc.seed = 8;
  retriever::train_retriever(fx.model, data, fx.store, tc);
  double after = retriever::recall_at_k(fx.model, data, fx.store, 2);
  CHECK(after >= before);
  CHECK(after >= 0.8);
}

TEST_CASE("retriever save/load reproduces embeddings") {
  auto fx = Fixture::make(6, 12);
  auto p = passage_of("ent3 thing described here");
  Eigen::VectorXd before = fx.model.encode_passage(p);
  std::string dir = "/tmp/fel_retr_ckpt_test";
  fx.model.save(dir);
  auto cfg = small_config(static_cast<int>(fx.tok.vocab_size()));
  retriever::RetrieverModel other(cfg, fx.tok, 999);
  other.load(dir);
  CHECK((other.encode_passage(p) - before).norm() == doctest::Approx(0.0));
}
