#include "core/kb.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace fel::kb {

using nlohmann::json;

void EntityStore::add(Entity e) {
  if (e.title.empty()) {
    throw Error(ErrorCode::EmptyTitle, "entity id=" + e.id);
  }
  if (by_title_.count(e.title)) {
    throw Error(ErrorCode::DuplicateTitle, "title=" + e.title);
  }
  if (by_id_.count(e.id)) {
    throw Error(ErrorCode::MalformedRecord, "duplicate id=" + e.id);
  }
  std::size_t idx = entities_.size();
  by_id_[e.id] = idx;
  by_title_[e.title] = idx;
  entities_.push_back(std::move(e));
}

const Entity* EntityStore::by_id(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &entities_[it->second];
}

const Entity* EntityStore::by_title(const std::string& title) const {
  auto it = by_title_.find(title);
  return it == by_title_.end() ? nullptr : &entities_[it->second];
}

std::string normalize_surface(const std::string& surface) {
  return normalize_whitespace(surface);
}

void CandidateMap::add(const std::string& surface,
                       std::vector<std::string> ids) {
  std::vector<std::string> deduped;
  std::unordered_set<std::string> seen;
  for (auto& id : ids) {
    if (seen.insert(id).second) deduped.push_back(std::move(id));
  }
  lists_[normalize_surface(surface)] = std::move(deduped);
}

std::vector<std::string> CandidateMap::candidates_for(
    const std::string& surface, std::size_t k) const {
  auto it = lists_.find(normalize_surface(surface));
  if (it == lists_.end()) return {};
  const auto& list = it->second;
  std::size_t n = std::min(k, list.size());
  return {list.begin(), list.begin() + static_cast<std::ptrdiff_t>(n)};
}

bool CandidateMap::contains(const std::string& surface) const {
  return lists_.count(normalize_surface(surface)) > 0;
}

void PriorTable::observe(const std::string& surface,
                         const std::string& entity_id, std::uint64_t count) {
  std::string m = normalize_surface(surface);
  counts_[m][entity_id] += count;
  marginals_[m] += count;
}

std::optional<double> PriorTable::prior(const std::string& surface,
                                        const std::string& entity_id) const {
  std::string m = normalize_surface(surface);
  auto mit = marginals_.find(m);
  if (mit == marginals_.end() || mit->second == 0) return std::nullopt;
  auto cit = counts_.find(m);
  auto eit = cit->second.find(entity_id);
  std::uint64_t c = eit == cit->second.end() ? 0 : eit->second;
  return static_cast<double>(c) / static_cast<double>(mit->second);
}

std::uint64_t PriorTable::marginal(const std::string& surface) const {
  auto it = marginals_.find(normalize_surface(surface));
  return it == marginals_.end() ? 0 : it->second;
}

std::string difficulty_bracket(std::optional<double> prior_of_gold) {
  if (!prior_of_gold) return "below";
  double p = *prior_of_gold;
  if (p < 0.0 || p > 1.0) {
    throw Error(ErrorCode::OutOfRange, "prior=" + std::to_string(p));
  }
  if (p == 1.0) return "1";
  if (p >= 0.9) return "[1 - 0.9]";
  if (p >= 0.8) return "[0.9 - 0.8]";
  if (p >= 0.7) return "[0.8 - 0.7]";
  if (p >= 0.6) return "[0.7 - 0.6]";
  if (p >= 0.5) return "[0.6 - 0.5]";
  if (p >= 0.4) return "[0.5 - 0.4]";
  if (p >= 0.3) return "[0.4 - 0.3]";
  return "below";
}

namespace {

json parse_line(const std::string& line, std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::MalformedRecord,
                "line " + std::to_string(lineno) + ": not a JSON object");
  }
  return j;
}

std::string require_string(const json& j, const char* field,
                           std::size_t lineno) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw Error(ErrorCode::MalformedRecord,
                "line " + std::to_string(lineno) + ": missing field '" +
                    field + "'");
  }
  return j[field].get<std::string>();
}

}  // namespace

EntityStore ingest_entities(std::istream& records) {
  EntityStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(records, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, lineno);
    Entity e;
    e.id = require_string(j, "id", lineno);
    e.title = require_string(j, "title", lineno);
    e.description =
        j.contains("description") ? j["description"].get<std::string>() : "";
    try {
      store.add(std::move(e));
    } catch (const Error& err) {
      throw Error(err.code(), "line " + std::to_string(lineno));
    }
  }
  return store;
}

EntityStore load_entities_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return ingest_entities(in);
}

CandidateMap ingest_candidates(std::istream& records,
                               const EntityStore& store) {
  CandidateMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(records, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, lineno);
    std::string mention = require_string(j, "mention", lineno);
    if (!j.contains("candidates") || !j["candidates"].is_array()) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(lineno) + ": missing 'candidates'");
    }
    std::vector<std::string> ids;
    for (const auto& c : j["candidates"]) {
      std::string id = c.get<std::string>();
      if (!store.by_id(id)) {
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(lineno) + ": unknown entity id " +
                        id);
      }
      ids.push_back(std::move(id));
    }
    map.add(mention, std::move(ids));
  }
  return map;
}

CandidateMap load_candidates_file(const std::string& path,
                                  const EntityStore& store) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return ingest_candidates(in, store);
}

std::vector<AnnotatedDocument> ingest_corpus(std::istream& records) {
  std::vector<AnnotatedDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(records, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, lineno);
    AnnotatedDocument d;
    d.doc_id = require_string(j, "doc_id", lineno);
    d.text = require_string(j, "text", lineno);
    if (j.contains("annotations")) {
      for (const auto& a : j["annotations"]) {
        Annotation ann;
        ann.start = a.at("start").get<std::size_t>();
        ann.end = a.at("end").get<std::size_t>();
        ann.entity_id = a.at("entity_id").get<std::string>();
        if (ann.start >= ann.end || ann.end > d.text.size()) {
          throw Error(ErrorCode::MalformedRecord,
                      "line " + std::to_string(lineno) + ": bad span");
        }
        d.annotations.push_back(std::move(ann));
      }
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<AnnotatedDocument> load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return ingest_corpus(in);
}

double cl_recall(const std::vector<AnnotatedDocument>& dataset,
                 const CandidateMap& map, std::size_t k) {
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& doc : dataset) {
    for (const auto& ann : doc.annotations) {
      ++total;
      auto cands = map.candidates_for(doc.surface(ann), k);
      for (const auto& id : cands) {
        if (id == ann.entity_id) {
          ++hits;
          break;
        }
      }
    }
  }
  if (total == 0) throw Error(ErrorCode::EmptyDataset, "no annotations");
  return static_cast<double>(hits) / static_cast<double>(total);
}

PriorTable compute_prior(const std::vector<AnnotatedDocument>& corpus) {
  PriorTable table;
  for (const auto& doc : corpus) {
    for (const auto& ann : doc.annotations) {
      table.observe(doc.surface(ann), ann.entity_id);
    }
  }
  return table;
}

}  // namespace fel::kb
