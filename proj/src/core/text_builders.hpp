#pragma once

#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/kb.hpp"
#include "core/tokenizer.hpp"

namespace fel::text {

struct Passage {
  std::string doc_id;
  std::size_t token_start = 0;  // index into the document token sequence
  std::size_t token_count = 0;
  std::string text;             // original document substring
  std::size_t char_offset = 0;  // char offset of the first token in the doc
  std::string topic;            // document topic t
};

inline constexpr std::size_t kEdContextBudget = 250;
inline constexpr std::size_t kEdEntityBudget = 140;
inline constexpr std::size_t kRetrievalDescBudget = 128;
inline constexpr std::size_t kDocTruncBudget = 20;
inline constexpr std::size_t kDefaultWindow = 20;
inline constexpr std::size_t kDefaultStride = 10;

// `left <s1> mention <e1> right`, truncated to <= budget tokens total by
// trimming the far ends, excess split evenly between the two sides. The span
// must land on token boundaries.
std::vector<std::string> mark_mention(const std::string& doc, Span span,
                                      std::size_t budget = kEdContextBudget);

// Sliding-window passages over the document; starts at 0, stride, 2*stride...
std::vector<Passage> chunk_passages(const kb::AnnotatedDocument& doc,
                                    std::size_t window = kDefaultWindow,
                                    std::size_t stride = kDefaultStride);

// First `budget` tokens of the document, used both as reader context D and
// as the retrieval topic t.
std::vector<std::string> truncate_doc(const std::string& text,
                                      std::size_t budget = kDocTruncBudget);

// `context <extra_id_2> title <extra_id_3> description`; the entity part
// (everything after <extra_id_2>) is capped at desc_budget tokens, trimmed
// from the description tail. Markers are never trimmed.
std::vector<std::string> build_ed_input(
    const std::vector<std::string>& context, const kb::Entity& e,
    std::size_t desc_budget = kEdEntityBudget);

// `<extra_id_0> D <extra_id_1> p <extra_id_2> title <extra_id_3> description`.
std::vector<std::string> build_el_input(
    const std::vector<std::string>& doc_trunc, const Passage& p,
    const kb::Entity& e, std::size_t desc_budget = kEdEntityBudget);

// `[CLS] title [ENT] description [SEP]`, description capped at desc_budget.
std::vector<std::string> build_retrieval_entity_text(
    const kb::Entity& e, std::size_t desc_budget = kRetrievalDescBudget);

// `[CLS] p [SEP] t [SEP]`.
std::vector<std::string> build_retrieval_passage_text(const Passage& p);

}  // namespace fel::text
