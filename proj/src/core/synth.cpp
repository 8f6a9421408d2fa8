#include "core/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

namespace fel::synth {

namespace {

const std::vector<std::string>& nouns() {
  static const std::vector<std::string> kNouns = {
      "river", "hill",  "press", "club",   "lake",   "tower", "forge",
      "field", "union", "works", "garden", "bridge", "point", "valley",
      "mills", "haven", "grove", "square", "branch", "harbor"};
  return kNouns;
}

const std::vector<std::string>& fillers() {
  static const std::vector<std::string> kFillers = {
      "the",    "a",     "of",    "on",    "by",    "and",  "near",
      "report", "today", "game",  "season", "team", "city", "new",
      "old",    "first", "last",  "night", "match", "coach", "final",
      "open",   "visit", "talks", "market", "price", "storm", "road",
      "plan",   "vote"};
  return kFillers;
}

}  // namespace

SynthData make(const SynthOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  SynthData data;

  for (std::size_t i = 0; i < opts.n_entities; ++i) {
    kb::Entity e;
    e.id = "E" + std::to_string(i);
    e.title = "zq" + std::to_string(i) + " " + nouns()[i % nouns().size()];
    std::string desc = "the " + nouns()[i % nouns().size()] + " called zq" +
                       std::to_string(i);
    std::uniform_int_distribution<std::size_t> pick(0, fillers().size() - 1);
    for (int w = 0; w < 6; ++w) desc += " " + fillers()[pick(rng)];
    e.description = desc;
    data.entities.push_back(std::move(e));
  }

  std::uniform_int_distribution<std::size_t> pick_filler(0,
                                                         fillers().size() - 1);
  for (std::size_t d = 0; d < opts.n_docs; ++d) {
    kb::AnnotatedDocument doc;
    doc.doc_id = "doc" + std::to_string(d);

    // Distinct entities per document.
    std::vector<std::size_t> ids(opts.n_entities);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(opts.mentions_per_doc, ids.size()));

    std::string text;
    auto emit = [&text](const std::string& tok) {
      if (!text.empty()) text += " ";
      text += tok;
    };
    for (std::size_t m = 0; m < ids.size(); ++m) {
      for (std::size_t f = 0; f < opts.filler_run; ++f) {
        emit(fillers()[pick_filler(rng)]);
      }
      const kb::Entity& e = data.entities[ids[m]];
      if (!text.empty()) text += " ";
      std::size_t start = text.size();
      text += e.title;
      doc.annotations.push_back({start, text.size(), e.id});
    }
    for (std::size_t f = 0; f < opts.filler_run; ++f) {
      emit(fillers()[pick_filler(rng)]);
    }
    doc.text = std::move(text);
    data.docs.push_back(std::move(doc));
  }

  for (std::size_t i = 0; i < opts.n_entities; ++i) {
    std::vector<std::string> list = {data.entities[i].id};
    std::uniform_int_distribution<std::size_t> pick_ent(0,
                                                        opts.n_entities - 1);
    while (list.size() < 1 + std::min(opts.distractors, opts.n_entities - 1)) {
      std::string other = data.entities[pick_ent(rng)].id;
      if (std::find(list.begin(), list.end(), other) == list.end()) {
        list.push_back(other);
      }
    }
    std::shuffle(list.begin(), list.end(), rng);
    data.candidates.emplace_back(data.entities[i].title, std::move(list));
  }
  return data;
}

void write_jsonl(const SynthData& data, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  using nlohmann::json;

  std::ofstream ents(fs::path(dir) / "entities.jsonl");
  for (const auto& e : data.entities) {
    ents << json{{"id", e.id}, {"title", e.title}, {"description", e.description}}
                .dump()
         << "\n";
  }
  std::ofstream corpus(fs::path(dir) / "corpus.jsonl");
  for (const auto& d : data.docs) {
    json anns = json::array();
    for (const auto& a : d.annotations) {
      anns.push_back(
          {{"start", a.start}, {"end", a.end}, {"entity_id", a.entity_id}});
    }
    corpus << json{{"doc_id", d.doc_id}, {"text", d.text}, {"annotations", anns}}
                  .dump()
           << "\n";
  }
  std::ofstream cands(fs::path(dir) / "candidates.jsonl");
  for (const auto& [mention, list] : data.candidates) {
    cands << json{{"mention", mention}, {"candidates", list}}.dump() << "\n";
  }
}

}  // namespace fel::synth
