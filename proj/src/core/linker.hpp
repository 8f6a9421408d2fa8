#pragma once

#include <string>
#include <vector>

#include "core/fusion_model.hpp"
#include "core/grammar.hpp"
#include "core/kb.hpp"
#include "core/retriever.hpp"
#include "core/text_builders.hpp"

namespace fel::linker {

struct Provenance {
  std::size_t window_offset = 0;  // token offset of the source window
  std::string decoded;            // raw decoder output string
};

struct LinkedAnnotation {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string entity_id;
  Provenance provenance;

  bool same_link(const LinkedAnnotation& o) const {
    return start == o.start && end == o.end && entity_id == o.entity_id;
  }
};

struct LinkResult {
  std::string doc_id;
  std::vector<LinkedAnnotation> annotations;  // sorted by (start, end)
  std::vector<std::string> dropped;           // ungroundable mention log
};

struct LinkOptions {
  std::size_t window = text::kDefaultWindow;
  std::size_t stride = text::kDefaultStride;
  std::size_t top_k = 100;       // retrieval candidates per window
  std::size_t max_decode_len = 48;
  std::size_t threads = 1;
};

// ED: mark mention (250-token budget), take candidates, fuse, greedy decode,
// resolve. Returns nullopt when the decode resolves to nothing.
std::optional<std::string> disambiguate(
    const kb::AnnotatedDocument& doc, Span span, const kb::EntityStore& store,
    const kb::CandidateMap& candidate_map, model::FusionReader& reader,
    const text::Tokenizer& tokenizer,
    grammar::TargetMode mode = grammar::TargetMode::Title,
    std::size_t max_candidates = 200);

// All non-overlapping left-to-right, token-boundary-aligned occurrences of
// the mention string in the passage text (passage-local char spans).
std::vector<Span> ground_mentions(const text::Passage& p,
                                  const std::string& mention);

// Longest span wins among overlapping non-identical spans (ties: earlier
// start, then lower entity id); identical spans with different entities are
// all kept; exact duplicates deduplicated.
std::vector<LinkedAnnotation> resolve_overlaps(
    std::vector<LinkedAnnotation> annotations);

LinkResult link_document(const kb::AnnotatedDocument& doc,
                         const kb::EntityStore& store,
                         retriever::RetrieverModel& retriever_model,
                         const retriever::VectorIndex& index,
                         model::FusionReader& reader,
                         const text::Tokenizer& tokenizer,
                         const LinkOptions& opts = {});

// JSON Lines {doc_id, annotations:[{start,end,entity_id}]}, same schema as
// the gold corpus files.
void write_link_results(const std::string& path,
                        const std::vector<LinkResult>& results);
std::vector<LinkResult> load_link_results(const std::string& path);

}  // namespace fel::linker
