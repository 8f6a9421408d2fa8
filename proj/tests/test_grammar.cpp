#include "core/grammar.hpp"
#include "doctest.h"

using namespace fel;
using grammar::ElPrediction;
using grammar::EntityMentions;
using grammar::ParseMode;
using grammar::TargetMode;

TEST_CASE("serialize emits the canonical byte form") {
  ElPrediction p;
  p.entries = {{"Jack Charlton", {"Charlton", "Jack"}},
               {"Ireland", {"Ireland"}}};
  CHECK(grammar::serialize_el(p) ==
        "Jack Charlton <extra_id_4> Charlton, Jack <extra_id_5> "
        "Ireland <extra_id_4> Ireland");
  CHECK(grammar::serialize_el({}) == "");
}

TEST_CASE("serialize rejects malformed predictions") {
  ElPrediction no_mentions;
  no_mentions.entries = {{"T", {}}};
  CHECK_THROWS_AS(grammar::serialize_el(no_mentions), Error);

  ElPrediction marker_title;
  marker_title.entries = {{"bad <extra_id_4> title", {"m"}}};
  CHECK_THROWS_AS(grammar::serialize_el(marker_title), Error);

  ElPrediction empty_title;
  empty_title.entries = {{"", {"m"}}};
  CHECK_THROWS_AS(grammar::serialize_el(empty_title), Error);
}

TEST_CASE("parse inverts serialize") {
  ElPrediction p;
  p.entries = {{"A", {"a1", "a2"}}, {"B", {"b"}}};
  auto q = grammar::parse_el(grammar::serialize_el(p), ParseMode::Strict);
  REQUIRE(q.entries.size() == 2);
  CHECK(q.entries[0].title == "A");
  CHECK(q.entries[0].mentions == std::vector<std::string>{"a1", "a2"});
  CHECK(q.entries[1].title == "B");

  CHECK(grammar::parse_el("", ParseMode::Strict).entries.empty());
}

TEST_CASE("parse normalizes whitespace and accepts bare commas") {
  auto p = grammar::parse_el("  A  <extra_id_4>  x ,y  ", ParseMode::Strict);
  REQUIRE(p.entries.size() == 1);
  CHECK(p.entries[0].title == "A");
  CHECK(p.entries[0].mentions == std::vector<std::string>{"x", "y"});
}

TEST_CASE("strict parse reports the offending segment") {
  // second segment lacks the title/mention separator
  std::string s = "A <extra_id_4> a <extra_id_5> broken";
  try {
    grammar::parse_el(s, ParseMode::Strict);
    FAIL("expected MalformedSegment");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedSegment);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }

  CHECK_THROWS_AS(
      grammar::parse_el("A <extra_id_4> ", ParseMode::Strict), Error);
  CHECK_THROWS_AS(
      grammar::parse_el("A <extra_id_4> a <extra_id_5> A <extra_id_4> b",
                        ParseMode::Strict),
      Error);
}

TEST_CASE("lenient parse drops bad segments and keeps the rest") {
  std::string s =
      "garbage <extra_id_5> B <extra_id_4> b <extra_id_5> <extra_id_4> x";
  auto p = grammar::parse_el(s, ParseMode::Lenient);
  REQUIRE(p.entries.size() == 1);
  CHECK(p.entries[0].title == "B");
}

TEST_CASE("lenient parse never throws on arbitrary input") {
  for (const char* s :
       {"<extra_id_4>", "<extra_id_5>", ", , ,", "a <extra_id_4> b <extra_id_4> c",
        "\x01\xff raw bytes <extra_id_5>"}) {
    CHECK_NOTHROW(grammar::parse_el(s, ParseMode::Lenient));
  }
}

TEST_CASE("resolve_entity in title mode") {
  std::vector<kb::Entity> cands = {{"E1", "Alpha Beta", ""}, {"E2", "Gamma", ""}};
  CHECK(*grammar::resolve_entity("Alpha  Beta", cands, TargetMode::Title) ==
        "E1");
  CHECK(*grammar::resolve_entity("Gamma", cands, TargetMode::Title) == "E2");
  CHECK(!grammar::resolve_entity("gamma", cands, TargetMode::Title));  // no case fold
  CHECK(!grammar::resolve_entity("Missing", cands, TargetMode::Title));
}

TEST_CASE("resolve_entity in index mode") {
  std::vector<kb::Entity> abc = {{"a", "A", ""}, {"b", "B", ""}, {"c", "C", ""}};
  CHECK(*grammar::resolve_entity("2", abc, TargetMode::Index) == "c");
  CHECK(*grammar::resolve_entity("0", abc, TargetMode::Index) == "a");
  CHECK(!grammar::resolve_entity("3", abc, TargetMode::Index));
  CHECK(!grammar::resolve_entity("-1", abc, TargetMode::Index));
  CHECK(!grammar::resolve_entity("1x", abc, TargetMode::Index));
  CHECK(!grammar::resolve_entity("", abc, TargetMode::Index));
}
