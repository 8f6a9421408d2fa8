#include "core/eval.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace fel::eval {

using nlohmann::json;

double ed_accuracy(
    const std::vector<std::pair<std::string, std::string>>& predictions) {
  if (predictions.empty()) throw Error(ErrorCode::EmptyInput, "ed_accuracy");
  std::size_t correct = 0;
  for (const auto& [gold, pred] : predictions) {
    if (gold == pred) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(predictions.size());
}

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::string>;

std::multiset<Key> annotation_keys(const linker::LinkResult& r) {
  std::multiset<Key> keys;
  for (const auto& a : r.annotations) keys.insert({a.start, a.end, a.entity_id});
  return keys;
}

}  // namespace

MicroPRF micro_prf(const std::vector<linker::LinkResult>& pred,
                   const std::vector<linker::LinkResult>& gold,
                   const kb::EntityStore& in_kb) {
  std::unordered_map<std::string, const linker::LinkResult*> gold_by_doc;
  for (const auto& g : gold) gold_by_doc[g.doc_id] = &g;

  MicroPRF out;
  for (const auto& p : pred) {
    auto it = gold_by_doc.find(p.doc_id);
    if (it == gold_by_doc.end()) {
      throw Error(ErrorCode::DocMismatch, "no gold for doc " + p.doc_id);
    }
    std::multiset<Key> gold_keys;
    for (const auto& a : it->second->annotations) {
      if (!in_kb.by_id(a.entity_id)) continue;  // InKB convention
      gold_keys.insert({a.start, a.end, a.entity_id});
    }
    for (const auto& key : annotation_keys(p)) {
      auto git = gold_keys.find(key);
      if (git != gold_keys.end()) {
        ++out.tp;
        gold_keys.erase(git);
      } else {
        ++out.fp;
      }
    }
    out.fn += gold_keys.size();
  }
  out.precision = (out.tp + out.fp) == 0
                      ? 0.0
                      : static_cast<double>(out.tp) /
                            static_cast<double>(out.tp + out.fp);
  out.recall = (out.tp + out.fn) == 0
                   ? 0.0
                   : static_cast<double>(out.tp) /
                         static_cast<double>(out.tp + out.fn);
  out.f1 = (out.precision + out.recall) == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall /
                     (out.precision + out.recall);
  return out;
}

std::map<std::string, BracketStats> bracket_report(
    const std::vector<EdPrediction>& predictions,
    const kb::PriorTable& prior_table) {
  std::map<std::string, BracketStats> table;
  for (const auto* name : kb::kBracketNames) table[name] = {};
  for (const auto& p : predictions) {
    std::string bracket =
        kb::difficulty_bracket(prior_table.prior(p.surface, p.gold_id));
    auto& stats = table[bracket];
    ++stats.count;
    if (p.gold_id == p.predicted_id) ++stats.correct;
  }
  return table;
}

std::string report_json(const std::string& dataset, const MicroPRF& prf,
                        const std::map<std::string, BracketStats>& brackets) {
  json j = {{"dataset", dataset},
            {"metric", "InKB Micro F1"},
            {"value", prf.f1},
            {"counts", {{"tp", prf.tp}, {"fp", prf.fp}, {"fn", prf.fn}}},
            {"precision", prf.precision},
            {"recall", prf.recall}};
  json b = json::object();
  for (const auto& [name, stats] : brackets) {
    json entry = {{"count", stats.count}};
    if (stats.count > 0) entry["accuracy"] = stats.accuracy();
    b[name] = entry;
  }
  j["brackets"] = b;
  return j.dump(2);
}

std::string report_text(const MicroPRF& prf,
                        const std::map<std::string, BracketStats>& brackets) {
  std::ostringstream os;
  os << "P=" << prf.precision << " R=" << prf.recall << " F1=" << prf.f1
     << " (tp=" << prf.tp << " fp=" << prf.fp << " fn=" << prf.fn << ")\n";
  bool any = false;
  for (const auto& [name, stats] : brackets) {
    if (stats.count > 0) any = true;
  }
  if (any) {
    os << "bracket        count  accuracy\n";
    for (const char* name : kb::kBracketNames) {
      auto it = brackets.find(name);
      if (it == brackets.end()) continue;
      os << name;
      for (std::size_t i = std::string(name).size(); i < 15; ++i) os << ' ';
      os << it->second.count << "  ";
      if (it->second.count > 0) {
        os << it->second.accuracy();
      } else {
        os << "-";
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace fel::eval
