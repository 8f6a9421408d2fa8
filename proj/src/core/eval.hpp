#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/kb.hpp"
#include "core/linker.hpp"

namespace fel::eval {

struct MicroPRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct BracketStats {
  std::size_t count = 0;
  std::size_t correct = 0;

  double accuracy() const {
    return count == 0 ? 0.0
                      : static_cast<double>(correct) / static_cast<double>(count);
  }
};

// Fraction of exactly matching (gold, predicted) entity id pairs.
double ed_accuracy(
    const std::vector<std::pair<std::string, std::string>>& predictions);

// Pooled exact (start, end, entity_id) matching; gold annotations whose
// entity is outside `in_kb` are excluded before counting.
MicroPRF micro_prf(const std::vector<linker::LinkResult>& pred,
                   const std::vector<linker::LinkResult>& gold,
                   const kb::EntityStore& in_kb);

struct EdPrediction {
  std::string surface;
  std::string gold_id;
  std::string predicted_id;
};

// Per difficulty bracket (by prior of the gold entity) accuracy table,
// keyed in kBracketNames order.
std::map<std::string, BracketStats> bracket_report(
    const std::vector<EdPrediction>& predictions,
    const kb::PriorTable& prior_table);

// {dataset, metric, value, counts, brackets} JSON plus a plain-text table.
std::string report_json(const std::string& dataset, const MicroPRF& prf,
                        const std::map<std::string, BracketStats>& brackets);
std::string report_text(const MicroPRF& prf,
                        const std::map<std::string, BracketStats>& brackets);

}  // namespace fel::eval
