#include "core/grammar.hpp"

#include <charconv>
#include <unordered_set>

namespace fel::grammar {

namespace {

const std::string kMentionSep = "<extra_id_4>";
const std::string kEntitySep = "<extra_id_5>";

bool contains_marker(const std::string& s) {
  return s.find(kMentionSep) != std::string::npos ||
         s.find(kEntitySep) != std::string::npos;
}

std::vector<std::string> split_on(const std::string& s,
                                  const std::string& sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

}  // namespace

std::string serialize_el(const ElPrediction& pred) {
  std::string out;
  for (std::size_t i = 0; i < pred.entries.size(); ++i) {
    const auto& entry = pred.entries[i];
    if (entry.title.empty() || contains_marker(entry.title)) {
      throw Error(ErrorCode::MalformedSegment,
                  "bad title in segment " + std::to_string(i));
    }
    if (entry.mentions.empty()) {
      throw Error(ErrorCode::EmptyMentionList, "segment " + std::to_string(i));
    }
    if (i > 0) out += " " + kEntitySep + " ";
    out += entry.title + " " + kMentionSep + " ";
    for (std::size_t m = 0; m < entry.mentions.size(); ++m) {
      const auto& mention = entry.mentions[m];
      if (mention.empty() || contains_marker(mention)) {
        throw Error(ErrorCode::MalformedSegment,
                    "bad mention in segment " + std::to_string(i));
      }
      if (m > 0) out += ", ";
      out += mention;
    }
  }
  return out;
}

ElPrediction parse_el(const std::string& s, ParseMode mode) {
  ElPrediction pred;
  if (normalize_whitespace(s).empty()) return pred;

  std::unordered_set<std::string> seen_titles;
  auto segments = split_on(s, kEntitySep);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto halves = split_on(segments[i], kMentionSep);
    if (halves.size() != 2) {
      if (mode == ParseMode::Strict) {
        throw Error(ErrorCode::MalformedSegment, "segment " + std::to_string(i));
      }
      continue;
    }
    EntityMentions entry;
    entry.title = normalize_whitespace(halves[0]);
    if (entry.title.empty()) {
      if (mode == ParseMode::Strict) {
        throw Error(ErrorCode::MalformedSegment, "segment " + std::to_string(i));
      }
      continue;
    }
    for (auto& m : split_on(halves[1], ",")) {
      std::string mention = normalize_whitespace(m);
      if (!mention.empty()) entry.mentions.push_back(std::move(mention));
    }
    if (entry.mentions.empty()) {
      if (mode == ParseMode::Strict) {
        throw Error(ErrorCode::EmptyMentionList, "segment " + std::to_string(i));
      }
      continue;
    }
    if (!seen_titles.insert(entry.title).second) {
      if (mode == ParseMode::Strict) {
        throw Error(ErrorCode::DuplicateEntity, "segment " + std::to_string(i));
      }
      continue;
    }
    pred.entries.push_back(std::move(entry));
  }
  return pred;
}

std::optional<std::string> resolve_entity(
    const std::string& decoded, const std::vector<kb::Entity>& candidates,
    TargetMode mode) {
  if (mode == TargetMode::Title) {
    std::string want = normalize_whitespace(decoded);
    for (const auto& e : candidates) {
      if (normalize_whitespace(e.title) == want) return e.id;
    }
    return std::nullopt;
  }
  std::string trimmed = normalize_whitespace(decoded);
  std::size_t idx = 0;
  auto [ptr, ec] =
      std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), idx);
  if (ec != std::errc{} || ptr != trimmed.data() + trimmed.size()) {
    return std::nullopt;
  }
  if (idx >= candidates.size()) return std::nullopt;
  return candidates[idx].id;
}

}  // namespace fel::grammar
