#include <sstream>

#include "core/kb.hpp"
#include "doctest.h"

using namespace fel;

TEST_CASE("entity store rejects duplicates and empty titles") {
  kb::EntityStore store;
  store.add({"E1", "Jack Charlton", "footballer"});
  CHECK_THROWS_AS(store.add({"E2", "Jack Charlton", "other"}), Error);
  CHECK_THROWS_AS(store.add({"E3", "", "no title"}), Error);
  CHECK_THROWS_AS(store.add({"E1", "Another", ""}), Error);
  CHECK(store.by_id("E1")->title == "Jack Charlton");
  CHECK(store.by_title("Jack Charlton")->id == "E1");
  CHECK(store.by_id("missing") == nullptr);
}

TEST_CASE("entity store preserves insertion order") {
  kb::EntityStore store;
  store.add({"b", "B", ""});
  store.add({"a", "A", ""});
  CHECK(store.entities()[0].id == "b");
  CHECK(store.entities()[1].id == "a");
}

TEST_CASE("candidate map: order, dedup, truncation, normalization") {
  kb::CandidateMap map;
  map.add("New  York", {"E3", "E1", "E3", "E2"});
  CHECK(map.contains("New York"));
  CHECK(map.candidates_for("New York", 10) ==
        std::vector<std::string>{"E3", "E1", "E2"});
  CHECK(map.candidates_for(" New   York ", 2) ==
        std::vector<std::string>{"E3", "E1"});
  CHECK(map.candidates_for("unknown", 5).empty());
}

TEST_CASE("prior table") {
  kb::PriorTable t;
  t.observe("Paris", "E1", 3);
  t.observe("Paris", "E2", 1);
  CHECK(*t.prior("Paris", "E1") == doctest::Approx(0.75));
  CHECK(*t.prior("Paris", "E2") == doctest::Approx(0.25));
  CHECK(t.marginal("Paris") == 4);
  CHECK(!t.prior("London", "E1").has_value());
  CHECK(*t.prior("Paris", "E9") == doctest::Approx(0.0));
}

TEST_CASE("difficulty brackets: boundaries belong to the higher bracket") {
  CHECK(kb::difficulty_bracket(1.0) == "1");
  CHECK(kb::difficulty_bracket(0.95) == "[1 - 0.9]");
  CHECK(kb::difficulty_bracket(0.9) == "[1 - 0.9]");
  CHECK(kb::difficulty_bracket(0.85) == "[0.9 - 0.8]");
  CHECK(kb::difficulty_bracket(0.3) == "[0.4 - 0.3]");
  CHECK(kb::difficulty_bracket(0.29) == "below");
  CHECK(kb::difficulty_bracket(0.0) == "below");
  CHECK(kb::difficulty_bracket(std::nullopt) == "below");
  CHECK_THROWS_AS(kb::difficulty_bracket(1.1), Error);
  CHECK_THROWS_AS(kb::difficulty_bracket(-0.1), Error);
}

TEST_CASE("entity ingestion reports offending line") {
  std::istringstream good(
      R"({"id":"E1","title":"A","description":"d"})"
      "\n"
      R"({"id":"E2","title":"B","description":""})"
      "\n");
  auto store = kb::ingest_entities(good);
  CHECK(store.size() == 2);

  std::istringstream dup(
      R"({"id":"E1","title":"Jack Charlton","description":""})"
      "\n"
      R"({"id":"E2","title":"Jack Charlton","description":""})"
      "\n");
  try {
    kb::ingest_entities(dup);
    FAIL("expected DuplicateTitle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateTitle);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }

  std::istringstream bad("not json\n");
  try {
    kb::ingest_entities(bad);
    FAIL("expected MalformedRecord");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedRecord);
  }
}

TEST_CASE("candidate ingestion validates ids against the store") {
  kb::EntityStore store;
  store.add({"E1", "A", ""});
  std::istringstream bad(R"({"mention":"a","candidates":["E1","E9"]})" "\n");
  CHECK_THROWS_AS(kb::ingest_candidates(bad, store), Error);
  std::istringstream good(R"({"mention":"a","candidates":["E1"]})" "\n");
  CHECK(kb::ingest_candidates(good, store).size() == 1);
}

TEST_CASE("corpus ingestion validates spans") {
  std::istringstream good(
      R"({"doc_id":"d1","text":"hello world","annotations":[{"start":0,"end":5,"entity_id":"E1"}]})"
      "\n");
  auto docs = kb::ingest_corpus(good);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].surface(docs[0].annotations[0]) == "hello");

  std::istringstream bad(
      R"({"doc_id":"d1","text":"hi","annotations":[{"start":0,"end":9,"entity_id":"E1"}]})"
      "\n");
  CHECK_THROWS_AS(kb::ingest_corpus(bad), Error);
}

TEST_CASE("cl_recall counts gold presence in candidate lists") {
  kb::CandidateMap map;
  map.add("a", {"E1", "E2"});
  map.add("b", {"E3"});
  std::vector<kb::AnnotatedDocument> docs(1);
  docs[0].doc_id = "d";
  docs[0].text = "a b";
  docs[0].annotations = {{0, 1, "E1"}, {2, 3, "E9"}};
  CHECK(kb::cl_recall(docs, map, 5) == doctest::Approx(0.5));
  CHECK(kb::cl_recall(docs, map, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(kb::cl_recall({}, map, 5), Error);
}

TEST_CASE("compute_prior aggregates surface counts") {
  std::vector<kb::AnnotatedDocument> docs(1);
  docs[0].text = "Paris Paris Paris";
  docs[0].annotations = {{0, 5, "E1"}, {6, 11, "E1"}, {12, 17, "E2"}};
  auto t = kb::compute_prior(docs);
  CHECK(*t.prior("Paris", "E1") == doctest::Approx(2.0 / 3.0));
}
