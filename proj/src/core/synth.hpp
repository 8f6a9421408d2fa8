#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/kb.hpp"

namespace fel::synth {

// Deterministic toy dataset: entities with unique two-token titles, filler
// documents with mention annotations on token boundaries, and per-surface
// candidate lists containing the gold entity plus distractors.
struct SynthData {
  std::vector<kb::Entity> entities;
  std::vector<kb::AnnotatedDocument> docs;
  std::vector<std::pair<std::string, std::vector<std::string>>> candidates;
};

struct SynthOptions {
  std::size_t n_entities = 200;
  std::size_t n_docs = 20;
  std::size_t mentions_per_doc = 4;
  std::size_t filler_run = 6;  // filler tokens between mentions
  std::size_t distractors = 3;
  std::uint64_t seed = 0;
};

SynthData make(const SynthOptions& opts);

// entities.jsonl, corpus.jsonl, candidates.jsonl under `dir`.
void write_jsonl(const SynthData& data, const std::string& dir);

}  // namespace fel::synth
