#include <algorithm>
#include <random>

#include "core/fusion_model.hpp"
#include "doctest.h"

using namespace fel;

namespace {

model::ReaderConfig small_config(int vocab) {
  model::ReaderConfig rc;
  rc.tf.d_model = 16;
  rc.tf.heads = 2;
  rc.tf.ffn = 32;
  rc.tf.enc_layers = 1;
  rc.tf.dec_layers = 1;
  rc.tf.vocab_size = vocab;
  rc.n_cand = 4;
  rc.max_seq_len = 32;
  rc.max_target_len = 8;
  return rc;
}

std::vector<std::vector<int>> random_inputs(int n, int len, int vocab,
                                            std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(text::SpecialTokens::kCount,
                                          vocab - 1);
  std::vector<std::vector<int>> out(n);
  for (auto& seq : out) {
    for (int i = 0; i < len; ++i) seq.push_back(pick(rng));
  }
  return out;
}

}  // namespace

TEST_CASE("prefix trie membership and terminals") {
  model::PrefixTrie trie;
  CHECK(trie.empty());
  trie.insert({5, 6, 7});
  trie.insert({5, 6});
  trie.insert({9});
  CHECK(!trie.empty());

  auto n5 = trie.child(model::PrefixTrie::kRoot, 5);
  REQUIRE(n5.has_value());
  CHECK(!trie.terminal(*n5));
  auto n56 = trie.child(*n5, 6);
  REQUIRE(n56.has_value());
  CHECK(trie.terminal(*n56));
  CHECK(trie.child(*n56, 7).has_value());
  CHECK(!trie.child(model::PrefixTrie::kRoot, 6).has_value());
  CHECK(trie.children(model::PrefixTrie::kRoot).size() == 2);
}

TEST_CASE("initial teacher-forced loss is near ln(vocab)") {
  std::mt19937_64 rng(0);
  auto rc = small_config(40);
  model::FusionReader reader(rc, 0);
  auto inputs = random_inputs(2, 6, 40, rng);
  std::vector<int> target = {20, 21};
  double loss = reader.loss_value(inputs, target);
  CHECK(loss == doctest::Approx(std::log(40.0)).epsilon(0.15));
}

TEST_CASE("encode_candidates validates inputs") {
  auto rc = small_config(40);
  model::FusionReader reader(rc, 1);
  ad::Tape tape;
  CHECK_THROWS_AS(reader.encode_candidates(tape, {}), Error);
  std::vector<std::vector<int>> too_many(5, std::vector<int>{16, 17});
  CHECK_THROWS_AS(reader.encode_candidates(tape, too_many), Error);
  std::vector<std::vector<int>> too_long(1, std::vector<int>(33, 16));
  CHECK_THROWS_AS(reader.encode_candidates(tape, too_long), Error);
}

TEST_CASE("teacher_forced_loss rejects over-long targets") {
  auto rc = small_config(40);
  model::FusionReader reader(rc, 2);
  ad::Tape tape;
  std::vector<int> target(8, 16);  // + eos exceeds max_target_len
  CHECK_THROWS_AS(reader.teacher_forced_loss(tape, {{16, 17}}, target), Error);
}

TEST_CASE("greedy decode is invariant to candidate order") {
  std::mt19937_64 rng(7);
  auto rc = small_config(48);
  model::FusionReader reader(rc, 7);
  auto inputs = random_inputs(3, 5, 48, rng);

  std::vector<Eigen::VectorXd> base_logits;
  auto base = reader.greedy_decode(inputs, 6, &base_logits);

  std::vector<std::vector<int>> perm = {inputs[2], inputs[0], inputs[1]};
  std::vector<Eigen::VectorXd> perm_logits;
  auto out = reader.greedy_decode(perm, 6, &perm_logits);

  CHECK(out == base);
  REQUIRE(perm_logits.size() == base_logits.size());
  for (std::size_t i = 0; i < base_logits.size(); ++i) {
    CHECK((base_logits[i] - perm_logits[i]).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("constrained decode emits only trie members") {
  std::mt19937_64 rng(9);
  auto rc = small_config(48);
  model::FusionReader reader(rc, 9);
  model::PrefixTrie trie;
  std::vector<std::vector<int>> members = {{20, 21}, {20, 22, 23}, {30}};
  for (const auto& m : members) trie.insert(m);

  for (int trial = 0; trial < 10; ++trial) {
    auto inputs = random_inputs(2, 5, 48, rng);
    auto out = reader.constrained_decode(inputs, trie, 8);
    CHECK(std::find(members.begin(), members.end(), out) != members.end());
  }
  CHECK_THROWS_AS(
      reader.constrained_decode(random_inputs(1, 4, 48, rng),
                                model::PrefixTrie{}, 8),
      Error);
}

TEST_CASE("build_trie over titles accepts constrained output") {
  auto tok = text::Tokenizer::build_from_texts(
      {"alpha beta gamma delta epsilon"}, 1);
  auto trie = model::build_trie({"alpha beta", "gamma"}, tok);
  auto n = trie.child(model::PrefixTrie::kRoot, tok.id_of("gamma"));
  REQUIRE(n.has_value());
  CHECK(trie.terminal(*n));
}

TEST_CASE("small grad check passes") {
  std::mt19937_64 rng(3);
  model::ReaderConfig rc = small_config(24);
  rc.tf.d_model = 8;
  rc.tf.ffn = 16;
  model::FusionReader reader(rc, 3);
  auto inputs = random_inputs(2, 4, 24, rng);
  std::vector<int> target = {16, 17};
  double err = reader.grad_check(inputs, target, 1e-4, rng, 30);
  CHECK(err < 1e-3);
}

TEST_CASE("training reduces the loss and records the schedule") {
  std::mt19937_64 rng(11);
  auto rc = small_config(32);
  model::FusionReader reader(rc, 11);
  std::vector<model::TrainExample> data;
  for (int i = 0; i < 4; ++i) {
    model::TrainExample ex;
    ex.inputs = random_inputs(2, 5, 32, rng);
    ex.target = {16 + i};
    data.push_back(ex);
  }
  model::TrainConfig tc;
  tc.steps = 60;
  tc.batch = 2;
  tc.lr = 1e-2;
  auto curve = reader.train(data, tc);
  REQUIRE(curve.size() == 60);
  CHECK(curve.front().step == 1);
  CHECK(curve.back().step == 60);
  CHECK(curve.back().lr == doctest::Approx(0.0));
  CHECK(curve.back().loss < curve.front().loss);
}

TEST_CASE("save/load reproduces decoding exactly") {
  std::mt19937_64 rng(13);
  auto rc = small_config(32);
  model::FusionReader reader(rc, 13);
  auto inputs = random_inputs(2, 5, 32, rng);
  auto before = reader.greedy_decode(inputs, 6);

  std::string dir = "/tmp/fel_reader_ckpt_test";
  reader.save(dir);
  model::FusionReader other(rc, 99);
  other.load(dir);
  CHECK(other.greedy_decode(inputs, 6) == before);
}
