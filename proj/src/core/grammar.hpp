#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/kb.hpp"

namespace fel::grammar {

// One decoded linking: entity title plus the mentions attributed to it.
struct EntityMentions {
  std::string title;
  std::vector<std::string> mentions;

  bool operator==(const EntityMentions&) const = default;
};

struct ElPrediction {
  std::vector<EntityMentions> entries;

  bool operator==(const ElPrediction&) const = default;
};

enum class TargetMode { Title, Index };
enum class ParseMode { Strict, Lenient };

// `e1 <extra_id_4> m11, m12 <extra_id_5> e2 <extra_id_4> m21`; empty
// prediction serializes to the empty string. Titles and mentions may not
// contain the marker tokens.
std::string serialize_el(const ElPrediction& pred);

// Inverse of serialize_el. Lenient mode drops malformed segments; strict mode
// throws MalformedSegment / EmptyMentionList / DuplicateEntity with the
// offending segment index in the message.
ElPrediction parse_el(const std::string& s, ParseMode mode = ParseMode::Lenient);

// Title mode: exact title match after whitespace normalization, no case
// folding. Index mode: decimal 0-based position into `candidates`.
std::optional<std::string> resolve_entity(
    const std::string& decoded, const std::vector<kb::Entity>& candidates,
    TargetMode mode);

}  // namespace fel::grammar
