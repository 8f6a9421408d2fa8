#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/common.hpp"

namespace fel::kb {

struct Entity {
  std::string id;
  std::string title;
  std::string description;
};

struct Annotation {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string entity_id;

  bool operator==(const Annotation&) const = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::string text;
  std::vector<Annotation> annotations;

  std::string surface(const Annotation& a) const {
    return text.substr(a.start, a.end - a.start);
  }
};

class EntityStore {
 public:
  void add(Entity e);  // throws DuplicateTitle / EmptyTitle
  const Entity* by_id(const std::string& id) const;
  const Entity* by_title(const std::string& title) const;
  std::size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }

  // Entities in insertion order.
  const std::vector<Entity>& entities() const { return entities_; }

 private:
  std::vector<Entity> entities_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_title_;
};

// Key normalization for candidate lookups: whitespace collapsed, no case
// folding. Input is assumed NFC already (ASCII fixtures).
std::string normalize_surface(const std::string& surface);

class CandidateMap {
 public:
  // Order of `ids` is preserved; duplicate ids within a list are dropped.
  void add(const std::string& surface, std::vector<std::string> ids);
  std::vector<std::string> candidates_for(const std::string& surface,
                                          std::size_t k) const;
  bool contains(const std::string& surface) const;
  std::size_t size() const { return lists_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> lists_;
};

class PriorTable {
 public:
  void observe(const std::string& surface, const std::string& entity_id,
               std::uint64_t count = 1);
  // c(m,e)/c(m); nullopt when the surface was never observed.
  std::optional<double> prior(const std::string& surface,
                              const std::string& entity_id) const;
  std::uint64_t marginal(const std::string& surface) const;

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>>
      counts_;
  std::unordered_map<std::string, std::uint64_t> marginals_;
};

// Difficulty brackets, highest first. Boundary values belong to the higher
// bracket; exact 1.0 is its own bracket; <0.3 and unknown priors go "below".
inline constexpr const char* kBracketNames[] = {
    "1",           "[1 - 0.9]",   "[0.9 - 0.8]", "[0.8 - 0.7]", "[0.7 - 0.6]",
    "[0.6 - 0.5]", "[0.5 - 0.4]", "[0.4 - 0.3]", "below"};
inline constexpr std::size_t kNumBrackets = 9;

std::string difficulty_bracket(std::optional<double> prior_of_gold);

// --- ingestion -------------------------------------------------------------

// JSON Lines of {id, title, description}; errors carry the 1-based line.
EntityStore ingest_entities(std::istream& records);
EntityStore load_entities_file(const std::string& path);

// JSON Lines of {mention, candidates}; every id must exist in `store`.
CandidateMap ingest_candidates(std::istream& records, const EntityStore& store);
CandidateMap load_candidates_file(const std::string& path,
                                  const EntityStore& store);

// JSON Lines of {doc_id, text, annotations:[{start,end,entity_id}]}.
std::vector<AnnotatedDocument> ingest_corpus(std::istream& records);
std::vector<AnnotatedDocument> load_corpus_file(const std::string& path);

// --- metrics over candidate lists ------------------------------------------

double cl_recall(const std::vector<AnnotatedDocument>& dataset,
                 const CandidateMap& map, std::size_t k);

PriorTable compute_prior(const std::vector<AnnotatedDocument>& corpus);

}  // namespace fel::kb
